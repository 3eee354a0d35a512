/** Mapping from detector-native labels + attributes onto the six-class
 * trace scheme. The mapping must be total: every raw detection must hit
 * exactly one rule, and dropping is always explicit. */

import { readFileSync } from 'fs';
import { z } from 'zod';

import { RawDetection, WIRE_CLASSES, WireClass } from './types';

const ruleSchema = z.object({
  match: z.object({
    label: z.string(),
    side: z.enum(['left', 'right']).optional(),
    contact: z.boolean().optional(),
  }),
  emit: z.union([z.enum(WIRE_CLASSES), z.literal('drop')]),
});

const mappingSchema = z.object({
  rules: z.array(ruleSchema).min(1),
});

export type MappingRule = z.infer<typeof ruleSchema>;

export class MappingError extends Error {}

export class ClassMapping {
  constructor(private readonly rules: MappingRule[]) {}

  /** Wire class for a raw detection, or null when an explicit drop rule
   * matched. Throws when no rule covers the detection. */
  apply(det: RawDetection): WireClass | null {
    for (const rule of this.rules) {
      const m = rule.match;
      if (m.label !== det.label) continue;
      if (m.side !== undefined && m.side !== det.side) continue;
      if (m.contact !== undefined && m.contact !== det.contact) continue;
      return rule.emit === 'drop' ? null : rule.emit;
    }
    throw new MappingError(
      `no mapping rule for detection label=${det.label} side=${det.side} contact=${det.contact}`,
    );
  }
}

export function loadMapping(path: string): ClassMapping {
  const parsed = mappingSchema.parse(JSON.parse(readFileSync(path, 'utf-8')));
  return new ClassMapping(parsed.rules);
}

/** Default rules for detectors reporting hand/object labels with side and
 * contact attributes (covers the built-in color-blob detector). */
export const DEFAULT_MAPPING = new ClassMapping([
  { match: { label: 'hand', side: 'left', contact: true }, emit: 'active_left_hand' },
  { match: { label: 'hand', side: 'left', contact: false }, emit: 'idle_left_hand' },
  { match: { label: 'hand', side: 'right', contact: true }, emit: 'active_right_hand' },
  { match: { label: 'hand', side: 'right', contact: false }, emit: 'idle_right_hand' },
  { match: { label: 'object', contact: true }, emit: 'active_object' },
  { match: { label: 'object', contact: false }, emit: 'normal_object' },
  { match: { label: 'distractor' }, emit: 'drop' },
]);

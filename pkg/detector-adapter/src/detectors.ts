/** Detector backends.
 *
 * The adapter wraps anything implementing the Detector interface. Two
 * backends ship here:
 *
 *  - colorBlobDetector: finds connected same-color blobs against a small
 *    palette (green = left hand, goldenrod = right hand, red = object,
 *    cyan = distractor) and derives the hand-contact attribute from box
 *    adjacency. Fully offline and deterministic; meant for synthetic
 *    footage and plumbing tests.
 *  - scriptDetector: replays per-frame raw detections dumped to JSON by any
 *    external model, so real detector outputs can flow through the same
 *    mapping and export path without bundling an ML runtime.
 */

import { readFileSync } from 'fs';
import { z } from 'zod';

import { Box, Detector, FrameImage, RawDetection } from './types';

interface PaletteEntry {
  label: string;
  side?: 'left' | 'right';
  rgb: [number, number, number];
}

const PALETTE: PaletteEntry[] = [
  { label: 'hand', side: 'left', rgb: [46, 139, 87] },
  { label: 'hand', side: 'right', rgb: [218, 165, 32] },
  { label: 'object', rgb: [192, 48, 48] },
  { label: 'distractor', rgb: [48, 192, 192] },
];

const COLOR_TOLERANCE = 60;
const MIN_BLOB_AREA = 16;
const CONTACT_MARGIN_PX = 4;

function paletteIndexAt(frame: FrameImage, x: number, y: number): number {
  const o = (y * frame.width + x) * 4;
  const r = frame.data[o];
  const g = frame.data[o + 1];
  const b = frame.data[o + 2];
  for (let p = 0; p < PALETTE.length; p++) {
    const [pr, pg, pb] = PALETTE[p].rgb;
    if (Math.abs(r - pr) + Math.abs(g - pg) + Math.abs(b - pb) <= COLOR_TOLERANCE) {
      return p;
    }
  }
  return -1;
}

interface Blob {
  palette: number;
  box: Box;
  area: number;
}

/** 4-connected components per palette color, BFS flood fill. */
function findBlobs(frame: FrameImage): Blob[] {
  const { width, height } = frame;
  const owner = new Int8Array(width * height).fill(-1);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      owner[y * width + x] = paletteIndexAt(frame, x, y);
    }
  }
  const visited = new Uint8Array(width * height);
  const blobs: Blob[] = [];
  const stack: number[] = [];
  for (let start = 0; start < width * height; start++) {
    if (visited[start] || owner[start] < 0) continue;
    const palette = owner[start];
    let area = 0;
    let xMin = width, yMin = height, xMax = -1, yMax = -1;
    stack.push(start);
    visited[start] = 1;
    while (stack.length) {
      const idx = stack.pop()!;
      const x = idx % width;
      const y = (idx - x) / width;
      area++;
      if (x < xMin) xMin = x;
      if (y < yMin) yMin = y;
      if (x > xMax) xMax = x;
      if (y > yMax) yMax = y;
      const neighbors = [idx - 1, idx + 1, idx - width, idx + width];
      const edges = [x > 0, x < width - 1, y > 0, y < height - 1];
      for (let n = 0; n < 4; n++) {
        const ni = neighbors[n];
        if (edges[n] && !visited[ni] && owner[ni] === palette) {
          visited[ni] = 1;
          stack.push(ni);
        }
      }
    }
    if (area >= MIN_BLOB_AREA) {
      // pixel bounds to continuous box (exclusive right/bottom edge)
      blobs.push({
        palette,
        area,
        box: { xMin, yMin, xMax: xMax + 1, yMax: yMax + 1 },
      });
    }
  }
  return blobs;
}

function boxesTouch(a: Box, b: Box, margin: number): boolean {
  return (
    a.xMin - margin < b.xMax &&
    b.xMin - margin < a.xMax &&
    a.yMin - margin < b.yMax &&
    b.yMin - margin < a.yMax
  );
}

export function colorBlobDetector(): Detector {
  return {
    name: 'color-blob',
    detect(frame: FrameImage): RawDetection[] {
      const blobs = findBlobs(frame);
      const hands = blobs.filter((b) => PALETTE[b.palette].label === 'hand');
      const objects = blobs.filter((b) => PALETTE[b.palette].label === 'object');
      const frameArea = frame.width * frame.height;
      const detections: RawDetection[] = [];
      for (const blob of blobs) {
        const entry = PALETTE[blob.palette];
        let contact: boolean | undefined;
        if (entry.label === 'hand') {
          contact = objects.some((o) => boxesTouch(blob.box, o.box, CONTACT_MARGIN_PX));
        } else if (entry.label === 'object') {
          contact = hands.some((h) => boxesTouch(blob.box, h.box, CONTACT_MARGIN_PX));
        }
        // deterministic pseudo-confidence: bigger blobs score higher
        const score = Math.min(0.99, 0.85 + blob.area / (4 * frameArea));
        detections.push({ label: entry.label, score, box: blob.box, side: entry.side, contact });
      }
      // stable output order: by box position, then label
      detections.sort((a, b) =>
        a.box.xMin - b.box.xMin || a.box.yMin - b.box.yMin || a.label.localeCompare(b.label),
      );
      return detections;
    },
  };
}

const scriptSchema = z.object({
  frames: z.array(
    z.object({
      frame: z.number().int().nonnegative(),
      detections: z.array(
        z.object({
          label: z.string(),
          score: z.number().min(0).max(1),
          box: z.tuple([z.number(), z.number(), z.number(), z.number()]),
          side: z.enum(['left', 'right']).optional(),
          contact: z.boolean().optional(),
        }),
      ),
    }),
  ),
});

export function scriptDetector(scriptPath: string): Detector {
  const script = scriptSchema.parse(JSON.parse(readFileSync(scriptPath, 'utf-8')));
  const byFrame = new Map<number, RawDetection[]>();
  for (const f of script.frames) {
    byFrame.set(
      f.frame,
      f.detections.map((d) => ({
        label: d.label,
        score: d.score,
        box: { xMin: d.box[0], yMin: d.box[1], xMax: d.box[2], yMax: d.box[3] },
        side: d.side,
        contact: d.contact,
      })),
    );
  }
  return {
    name: 'script',
    detect(_frame: FrameImage, frameIndex: number): RawDetection[] {
      return byFrame.get(frameIndex) ?? [];
    },
  };
}

export function detectorFromSpec(spec: string): Detector {
  if (spec === 'color-blob') return colorBlobDetector();
  if (spec.startsWith('script:')) return scriptDetector(spec.slice('script:'.length));
  throw new Error(`unknown detector spec: ${spec} (use color-blob or script:<path>)`);
}

/** Shared types: raw detector output, the six-class wire scheme, frames. */

export interface Box {
  xMin: number;
  yMin: number;
  xMax: number;
  yMax: number;
}

/** Decoded RGBA frame. */
export interface FrameImage {
  width: number;
  height: number;
  /** RGBA, 4 bytes per pixel, row-major. */
  data: Uint8Array;
}

export type HandSideAttr = 'left' | 'right';

/**
 * One detection as the wrapped detector reports it: a native label plus
 * whatever side/contact attributes the detector exposes. The class mapping
 * turns these into the six-class trace scheme.
 */
export interface RawDetection {
  label: string;
  score: number;
  box: Box;
  side?: HandSideAttr;
  contact?: boolean;
}

export interface Detector {
  readonly name: string;
  detect(frame: FrameImage, frameIndex: number): RawDetection[];
}

export const WIRE_CLASSES = [
  'normal_object',
  'active_object',
  'idle_left_hand',
  'idle_right_hand',
  'active_left_hand',
  'active_right_hand',
] as const;

export type WireClass = (typeof WIRE_CLASSES)[number];

/** One detection in the trace wire format. */
export interface WireDetection {
  class: WireClass;
  score: number;
  box: [number, number, number, number];
  crop_ref: string | null;
}

export interface WireFrame {
  frame: number;
  detections: WireDetection[];
}

export interface WireHeader {
  video_id: string;
  fps: number;
  frame_count: number;
}

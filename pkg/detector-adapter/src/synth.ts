/** Synthetic footage generator: a moving left-hand blob approaching an
 * object, a static idle right hand, and a distractor. Used for examples and
 * plumbing tests; entirely deterministic. */

import { mkdirSync } from 'fs';
import { join } from 'path';

import { writeFrame } from './frames';
import { FrameImage } from './types';

const WIDTH = 320;
const HEIGHT = 240;

const LEFT_HAND_RGB: [number, number, number] = [46, 139, 87];
const RIGHT_HAND_RGB: [number, number, number] = [218, 165, 32];
const OBJECT_RGB: [number, number, number] = [192, 48, 48];
const DISTRACTOR_RGB: [number, number, number] = [48, 192, 192];
const BACKGROUND_RGB: [number, number, number] = [235, 235, 235];

function blankFrame(): FrameImage {
  const data = new Uint8Array(WIDTH * HEIGHT * 4);
  for (let i = 0; i < WIDTH * HEIGHT; i++) {
    data[i * 4] = BACKGROUND_RGB[0];
    data[i * 4 + 1] = BACKGROUND_RGB[1];
    data[i * 4 + 2] = BACKGROUND_RGB[2];
    data[i * 4 + 3] = 255;
  }
  return { width: WIDTH, height: HEIGHT, data };
}

function fillRect(
  frame: FrameImage,
  x: number,
  y: number,
  w: number,
  h: number,
  rgb: [number, number, number],
): void {
  for (let yy = Math.max(0, y); yy < Math.min(frame.height, y + h); yy++) {
    for (let xx = Math.max(0, x); xx < Math.min(frame.width, x + w); xx++) {
      const o = (yy * frame.width + xx) * 4;
      frame.data[o] = rgb[0];
      frame.data[o + 1] = rgb[1];
      frame.data[o + 2] = rgb[2];
      frame.data[o + 3] = 255;
    }
  }
}

export function synthFrame(t: number): FrameImage {
  const frame = blankFrame();
  fillRect(frame, 140, 100, 50, 40, OBJECT_RGB);             // target object
  fillRect(frame, 30, 28, 30, 20, DISTRACTOR_RGB);           // ignored by mapping
  fillRect(frame, 260, 180, 40, 40, RIGHT_HAND_RGB);         // idle right hand
  // left hand slides toward the object and reaches it around frame 6
  const x = 20 + 14 * t;
  const y = 150 - 6 * t;
  fillRect(frame, x, y, 40, 40, LEFT_HAND_RGB);
  return frame;
}

export function writeSynthFrames(outDir: string, frames: number): string[] {
  mkdirSync(outDir, { recursive: true });
  const paths: string[] = [];
  for (let t = 0; t < frames; t++) {
    const path = join(outDir, `frame_${String(t).padStart(4, '0')}.png`);
    writeFrame(path, synthFrame(t));
    paths.push(path);
  }
  return paths;
}

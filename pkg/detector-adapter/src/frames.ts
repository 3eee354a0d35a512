/** Frame sources: a video is consumed as a directory of numbered PNG
 * frames (extract with ffmpeg or any frame dumper first). */

import { readdirSync, readFileSync, writeFileSync } from 'fs';
import { join } from 'path';
import { PNG } from 'pngjs';

import { FrameImage } from './types';

export function listFrameFiles(framesDir: string): string[] {
  const files = readdirSync(framesDir)
    .filter((f) => f.toLowerCase().endsWith('.png'))
    .sort();
  if (files.length === 0) {
    throw new Error(`no .png frames found in ${framesDir}`);
  }
  return files.map((f) => join(framesDir, f));
}

export function readFrame(path: string): FrameImage {
  const png = PNG.sync.read(readFileSync(path));
  return { width: png.width, height: png.height, data: new Uint8Array(png.data) };
}

export function writeFrame(path: string, frame: FrameImage): void {
  const png = new PNG({ width: frame.width, height: frame.height });
  Buffer.from(frame.data.buffer, frame.data.byteOffset, frame.data.byteLength).copy(png.data);
  writeFileSync(path, PNG.sync.write(png));
}

/** Trace export: run the detector over every frame, map raw detections to
 * the six-class scheme, save active-object crops, and write the JSONL trace
 * the segmentation pipeline consumes. Deterministic for fixed inputs. */

import { mkdirSync, writeFileSync } from 'fs';
import { basename, join } from 'path';

import { PNG } from 'pngjs';

import { ClassMapping } from './mapping';
import { listFrameFiles, readFrame } from './frames';
import { Box, Detector, FrameImage, WireDetection, WireFrame, WireHeader } from './types';

export interface ExportOptions {
  framesDir: string;
  outDir: string;
  detector: Detector;
  mapping: ClassMapping;
  fps: number;
  videoId: string;
}

export interface ExportSummary {
  tracePath: string;
  frameCount: number;
  detections: number;
  cropsSaved: number;
}

function clampBox(box: Box, width: number, height: number): Box {
  return {
    xMin: Math.max(0, Math.floor(box.xMin)),
    yMin: Math.max(0, Math.floor(box.yMin)),
    xMax: Math.min(width, Math.ceil(box.xMax)),
    yMax: Math.min(height, Math.ceil(box.yMax)),
  };
}

function saveCrop(frame: FrameImage, box: Box, path: string): void {
  const c = clampBox(box, frame.width, frame.height);
  const w = c.xMax - c.xMin;
  const h = c.yMax - c.yMin;
  if (w <= 0 || h <= 0) throw new Error(`degenerate crop box ${JSON.stringify(box)}`);
  const png = new PNG({ width: w, height: h });
  for (let y = 0; y < h; y++) {
    const src = ((c.yMin + y) * frame.width + c.xMin) * 4;
    Buffer.from(frame.data.buffer, frame.data.byteOffset + src, w * 4).copy(
      png.data,
      y * w * 4,
    );
  }
  writeFileSync(path, PNG.sync.write(png));
}

export function exportTrace(options: ExportOptions): ExportSummary {
  const { framesDir, outDir, detector, mapping, fps, videoId } = options;
  if (fps <= 0) throw new Error(`fps must be > 0, got ${fps}`);
  const frameFiles = listFrameFiles(framesDir);

  mkdirSync(outDir, { recursive: true });
  mkdirSync(join(outDir, 'crops'), { recursive: true });

  const header: WireHeader = { video_id: videoId, fps, frame_count: frameFiles.length };
  const lines: string[] = [JSON.stringify(header)];
  let detections = 0;
  let cropsSaved = 0;

  frameFiles.forEach((file, frameIndex) => {
    const frame = readFrame(file);
    const wireDetections: WireDetection[] = [];
    detector.detect(frame, frameIndex).forEach((raw) => {
      const wireClass = mapping.apply(raw);
      if (wireClass === null) return;
      let cropRef: string | null = null;
      if (wireClass === 'active_object') {
        cropRef = `crops/${String(frameIndex).padStart(6, '0')}_${cropsSaved}.png`;
        saveCrop(frame, raw.box, join(outDir, cropRef));
        cropsSaved++;
      }
      wireDetections.push({
        class: wireClass,
        score: raw.score,
        box: [raw.box.xMin, raw.box.yMin, raw.box.xMax, raw.box.yMax],
        crop_ref: cropRef,
      });
      detections++;
    });
    const record: WireFrame = { frame: frameIndex, detections: wireDetections };
    lines.push(JSON.stringify(record));
  });

  const tracePath = join(outDir, 'trace.jsonl');
  writeFileSync(tracePath, lines.join('\n') + '\n');
  return { tracePath, frameCount: frameFiles.length, detections, cropsSaved };
}

export function describeExport(summary: ExportSummary, framesDir: string): string {
  return (
    `${basename(framesDir)}: ${summary.frameCount} frames, ` +
    `${summary.detections} detections, ${summary.cropsSaved} crops -> ${summary.tracePath}`
  );
}

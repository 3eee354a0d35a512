export { colorBlobDetector, detectorFromSpec, scriptDetector } from './detectors';
export { describeExport, exportTrace } from './export';
export type { ExportOptions, ExportSummary } from './export';
export { listFrameFiles, readFrame, writeFrame } from './frames';
export { ClassMapping, DEFAULT_MAPPING, MappingError, loadMapping } from './mapping';
export { synthFrame, writeSynthFrames } from './synth';
export * from './types';

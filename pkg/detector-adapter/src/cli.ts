import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import { detectorFromSpec } from './detectors';
import { describeExport, exportTrace } from './export';
import { DEFAULT_MAPPING, loadMapping } from './mapping';
import { writeSynthFrames } from './synth';

export function run(argv: string[]): unknown {
  return yargs(argv)
    .scriptName('detector-adapter')
    .command(
      'synth',
      'generate a synthetic frame sequence (moving hand + object)',
      (y) =>
        y
          .option('out-dir', { type: 'string', demandOption: true })
          .option('frames', { type: 'number', default: 10 }),
      (args) => {
        const paths = writeSynthFrames(args.outDir, args.frames);
        console.log(`wrote ${paths.length} frames to ${args.outDir}`);
      },
    )
    .command(
      'export',
      'run a detector over a frame directory and emit trace JSONL + crops',
      (y) =>
        y
          .option('frames-dir', { type: 'string', demandOption: true })
          .option('out-dir', { type: 'string', demandOption: true })
          .option('fps', { type: 'number', default: 30 })
          .option('video-id', { type: 'string', default: 'video' })
          .option('detector', {
            type: 'string',
            default: 'color-blob',
            describe: 'color-blob or script:<raw-detections.json>',
          })
          .option('mapping', {
            type: 'string',
            describe: 'class-mapping JSON (defaults to the built-in hand/object rules)',
          }),
      (args) => {
        const summary = exportTrace({
          framesDir: args.framesDir,
          outDir: args.outDir,
          detector: detectorFromSpec(args.detector),
          mapping: args.mapping ? loadMapping(args.mapping) : DEFAULT_MAPPING,
          fps: args.fps,
          videoId: args.videoId,
        });
        console.log(describeExport(summary, args.framesDir));
      },
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      console.error(err ? `error: ${err.message}` : msg);
      process.exit(1);
    })
    .parse();
}

if (require.main === module) {
  run(hideBin(process.argv));
}

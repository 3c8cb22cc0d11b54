/** CLI: render one figure from a simulator CSV to a standalone SVG file.
 *
 *   node dist/plot.js --kind trajectory --input out/trajectory.csv --output traj.svg
 *   node dist/plot.js --kind histogram --metric negativity_ratio \
 *       --input out/sweep_outcomes.csv --output hist.svg
 */

import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { CsvError, parseCsv } from "./csv.js";
import { FIGURE_KINDS, FigureKind, buildChart } from "./options.js";
import { renderSvg } from "./render.js";

async function main(): Promise<void> {
  const argv = await yargs(hideBin(process.argv))
    .option("kind", {
      choices: FIGURE_KINDS as unknown as FigureKind[],
      demandOption: true,
      describe: "figure kind",
    })
    .option("input", { type: "string", demandOption: true, describe: "input CSV path" })
    .option("output", { type: "string", demandOption: true, describe: "output SVG path" })
    .option("metric", {
      type: "string",
      describe: "metric column for histogram (default negativity_ratio)",
    })
    .option("width", { type: "number", default: 900 })
    .option("height", { type: "number", default: 540 })
    .strict()
    .parse();

  const text = readFileSync(argv.input, "utf-8");
  const table = parseCsv(text);
  const chart = buildChart(argv.kind as FigureKind, table, argv.metric);
  const svg = renderSvg(chart, argv.width, argv.height);
  writeFileSync(argv.output, svg, "utf-8");
  console.log(`${argv.kind} -> ${argv.output}`);
}

main().catch((error: unknown) => {
  if (error instanceof CsvError) {
    console.error(`input error: ${error.message}`);
  } else {
    console.error(error);
  }
  process.exitCode = 1;
});

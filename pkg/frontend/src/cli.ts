#!/usr/bin/env node
/** mamimo-plot <figure-id> --in DIR --out DIR */

import process from "node:process";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { renderFigure } from "./index.js";
import { PlotError } from "./model.js";
import { RECIPES } from "./recipes.js";

async function main(): Promise<void> {
  const argv = await yargs(hideBin(process.argv))
    .command("$0 <figure>", "render one figure from experiment CSV output", (y) =>
      y.positional("figure", {
        describe: "figure id",
        type: "string",
        choices: Object.keys(RECIPES),
        demandOption: true,
      }),
    )
    .option("in", { type: "string", default: "results", describe: "directory with CSV outputs" })
    .option("out", { type: "string", default: "figures", describe: "directory for SVG files" })
    .strict()
    .help()
    .parse();

  try {
    const out = renderFigure(argv.figure as string, argv.in, argv.out);
    console.log(out);
  } catch (err) {
    if (err instanceof PlotError) {
      console.error(`error: ${err.message}`);
      process.exit(1);
    }
    throw err;
  }
}

main();

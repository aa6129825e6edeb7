import fs from "node:fs";
import path from "node:path";

import { readCsv, readManifest } from "./csv.js";
import { PlotError } from "./model.js";
import { RECIPES } from "./recipes.js";
import { extractModel, render } from "./svg.js";

export { readCsv, readManifest } from "./csv.js";
export { PlotError } from "./model.js";
export type { PlotModel, Panel, Series } from "./model.js";
export { RECIPES } from "./recipes.js";
export { extractModel, render } from "./svg.js";

/** Render one figure from a results directory; returns the SVG path.
 * Nothing is written unless the inputs validate and the model builds. */
export function renderFigure(figureId: string, inDir: string, outDir: string): string {
  const recipe = RECIPES[figureId];
  if (!recipe) {
    throw new PlotError(`unknown figure id '${figureId}' (know: ${Object.keys(RECIPES).join(", ")})`);
  }
  const rows = readCsv(path.join(inDir, `${figureId}.csv`), recipe.schema);
  const manifest = readManifest(path.join(inDir, `${figureId}.manifest.json`));
  const model = recipe.build(rows, manifest);
  const svg = render(model);
  fs.mkdirSync(outDir, { recursive: true });
  const outPath = path.join(outDir, `${figureId}.svg`);
  fs.writeFileSync(outPath, svg);
  return outPath;
}

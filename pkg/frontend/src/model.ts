/** Plot model: what a figure draws, kept alongside the rendered SVG so the
 * plotted series can be extracted and checked against the source CSV. */

export interface Point {
  x: number;
  y: number;
}

export interface LineSeries {
  kind: "line";
  name: string;
  points: Point[];
}

export interface PointSeries {
  kind: "points";
  name: string;
  points: Point[];
}

/** Heat-map cells addressed by their raw coordinate values. */
export interface CellSeries {
  kind: "cells";
  name: string;
  cells: { x: number; y: number; value: number | string }[];
  /** "log" colors numeric values on a log10 ramp; "bucket" uses the
   * categorical overhead palette. */
  coloring: "log" | "bucket";
}

export interface VerticalLine {
  kind: "vline";
  name: string;
  x: number;
}

export type Series = LineSeries | PointSeries | CellSeries | VerticalLine;

export interface Panel {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: "linear" | "log";
  yScale: "linear" | "log";
  series: Series[];
}

export interface PlotModel {
  figure: string;
  title: string;
  panels: Panel[];
}

export class PlotError extends Error {}

#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import { loadFigCsv } from "./csv.js";
import { renderFigure } from "./render.js";

function usage(): never {
  console.error("usage: figviz CSV [CSV ...] --out FIGURE.svg");
  process.exit(2);
}

export function main(argv: string[]): void {
  const paths: string[] = [];
  let out: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--out") {
      out = argv[++i];
      if (out === undefined) usage();
    } else if (argv[i].startsWith("-")) {
      usage();
    } else {
      paths.push(argv[i]);
    }
  }
  if (paths.length === 0 || out === undefined) usage();

  const files = paths.map(loadFigCsv);
  writeFileSync(out, renderFigure(files), "utf-8");
  console.log(out);
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "")) {
  try {
    main(process.argv.slice(2));
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    process.exit(1);
  }
}

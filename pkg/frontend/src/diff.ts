// Word-level LCS diff between the original and variant sentence, producing
// runs for side-by-side highlighting. Concatenating the "same" runs with the
// changed-original runs reproduces the original sentence; with the
// changed-variant runs, the variant.

export type RunKind = "same" | "changed-original" | "changed-variant";

export type DiffRun = {
  kind: RunKind;
  tokens: string[];
};

export type DiffView = DiffRun[];

function lcsTable(a: string[], b: string[]): number[][] {
  const table: number[][] = Array.from({ length: a.length + 1 }, () =>
    new Array<number>(b.length + 1).fill(0)
  );
  for (let i = a.length - 1; i >= 0; i--) {
    for (let j = b.length - 1; j >= 0; j--) {
      table[i][j] =
        a[i] === b[j]
          ? table[i + 1][j + 1] + 1
          : Math.max(table[i + 1][j], table[i][j + 1]);
    }
  }
  return table;
}

function push(view: DiffView, kind: RunKind, token: string): void {
  const last = view[view.length - 1];
  if (last && last.kind === kind) {
    last.tokens.push(token);
  } else {
    view.push({ kind, tokens: [token] });
  }
}

export function computeDiff(original: string, variant: string): DiffView {
  const a = original.split(/\s+/).filter((t) => t.length > 0);
  const b = variant.split(/\s+/).filter((t) => t.length > 0);
  const table = lcsTable(a, b);
  const view: DiffView = [];
  let i = 0;
  let j = 0;
  while (i < a.length && j < b.length) {
    if (a[i] === b[j]) {
      push(view, "same", a[i]);
      i++;
      j++;
    } else if (table[i + 1][j] >= table[i][j + 1]) {
      push(view, "changed-original", a[i]);
      i++;
    } else {
      push(view, "changed-variant", b[j]);
      j++;
    }
  }
  while (i < a.length) {
    push(view, "changed-original", a[i]);
    i++;
  }
  while (j < b.length) {
    push(view, "changed-variant", b[j]);
    j++;
  }
  return view;
}

export function reconstruct(view: DiffView, side: "original" | "variant"): string {
  const skip = side === "original" ? "changed-variant" : "changed-original";
  return view
    .filter((run) => run.kind !== skip)
    .flatMap((run) => run.tokens)
    .join(" ");
}

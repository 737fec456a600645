import { spawnSync } from "node:child_process";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  EngineError,
  align,
  evaluate_corpus,
  score,
  tokenize,
  version,
  type CorpusReport,
  type HypothesisRecord,
  type ReferenceRecord,
} from "../src/index.js";

const DATA = fileURLToPath(new URL("../../tests/data", import.meta.url));
const PKG = JSON.parse(
  readFileSync(fileURLToPath(new URL("../package.json", import.meta.url)), "utf8"),
) as { version: string };

function readJsonl<T>(name: string): T[] {
  return readFileSync(join(DATA, name), "utf8")
    .split("\n")
    .filter((line) => line.trim() !== "")
    .map((line) => JSON.parse(line) as T);
}

// The worked example used across the engine's own suite.
const WORKED_TOKENS = [
  "i", "mean", "but", "she", "was", "truly", "she", "was", "truly", "aware",
];
const WORKED_TAGS = [
  "PRN", "PRN", "NONE", "EDITED", "EDITED", "EDITED", "NONE", "NONE", "NONE", "NONE",
];
const WORKED_HYP = "i mean but Luna was truly aware";

describe("version", () => {
  it("matches the engine and this package", () => {
    const engineVersion = version();
    expect(engineVersion).toBe(PKG.version);
  });
});

describe("tokenize", () => {
  it("splits contractions and punctuation", () => {
    expect(tokenize("don't stop")).toEqual(["do", "n't", "stop"]);
  });

  it("returns [] for empty text", () => {
    expect(tokenize("")).toEqual([]);
  });

  it("passes plain words through", () => {
    expect(tokenize("i mean but")).toEqual(["i", "mean", "but"]);
  });

  it("survives leading dashes", () => {
    expect(tokenize("--so anyway")).toEqual(["--", "so", "anyway"]);
  });
});

describe("score", () => {
  it("reproduces the golden worked-example record", () => {
    const record = score(WORKED_TOKENS, WORKED_TAGS, WORKED_HYP);
    expect(record.e_p).toBe(75.0);
    expect(record.e_r).toBe(60.0);
    expect(record.e_f).toBe(66.6667);
    expect(record.z_edited).toBe(100.0);
    expect(record.z_prn).toBe(0.0);
    expect(record.z_intj).toBeNull(); // NaN crosses the boundary as null
    expect([record.tp, record.fp, record.fn, record.tn]).toEqual([3, 1, 2, 4]);
    expect(record.hallucinations).toBe(1);
  });

  it("scores identity output as perfect with all rates undefined", () => {
    const record = score(["a", "b"], ["NONE", "NONE"], ["a", "b"]);
    expect(record.e_f).toBe(100.0);
    expect(record.z_edited).toBeNull();
    expect(record.z_intj).toBeNull();
    expect(record.z_prn).toBeNull();
  });

  it("surfaces engine validation errors as exceptions", () => {
    expect(() => score(["a"], ["NONE", "NONE"], "a")).toThrowError(
      /1 tokens but 2 tags/,
    );
    try {
      score(["a"], ["NONE", "NONE"], "a");
      expect.unreachable();
    } catch (error) {
      expect(error).toBeInstanceOf(EngineError);
      expect((error as EngineError).exitCode).toBe(1);
    }
  });

  it("plumbs separator and case options through", () => {
    expect(() => score(["5§6"], ["NONE"], ["5§6"])).toThrowError(/separator/);
    const record = score(["5§6"], ["NONE"], ["5§6"], { separator: "␟" });
    expect(record.e_f).toBe(100.0);
    const folded = score(["Fine"], ["NONE"], ["fine"], { caseMode: "insensitive" });
    expect(folded.e_f).toBe(100.0);
  });
});

describe("align", () => {
  it("reproduces the golden worked-example table", () => {
    const rows = align(WORKED_TOKENS, WORKED_TAGS, WORKED_HYP);
    expect(rows).toHaveLength(11);
    expect(rows[0]).toEqual({
      gt_token: "i", tag: "PRN", hyp_token: "i", hallucinated: false,
    });
    expect(rows[7]).toEqual({
      gt_token: null, tag: null, hyp_token: "Luna", hallucinated: true,
    });
    const removed = rows
      .filter((row) => !row.hallucinated && row.hyp_token === null)
      .map((row) => row.gt_token);
    expect(removed).toEqual(["she", "was", "truly", "she"]);
  });

  it("accepts pre-tokenized hypotheses", () => {
    const rows = align(["a", "b"], ["EDITED", "NONE"], ["b"]);
    expect(rows).toEqual([
      { gt_token: "a", tag: "EDITED", hyp_token: null, hallucinated: false },
      { gt_token: "b", tag: "NONE", hyp_token: "b", hallucinated: false },
    ]);
  });
});

describe("evaluate_corpus", () => {
  const refs = readJsonl<ReferenceRecord>("diag_ref.jsonl");

  it("matches the CLI report field-for-field on the shared fixtures", () => {
    for (const system of ["diag_sys0.jsonl", "diag_sys1.jsonl", "diag_sys2.jsonl"]) {
      const hyps = readJsonl<HypothesisRecord>(system);
      const viaBindings = evaluate_corpus(refs, hyps);

      const cli = spawnSync(
        process.env.ZSCORE_BIN ?? "zscore",
        [
          "eval",
          "--ref", join(DATA, "diag_ref.jsonl"),
          "--hyp", join(DATA, system),
          "--hyp-mode", "tokens",
        ],
        { encoding: "utf8", maxBuffer: 64 * 1024 * 1024 },
      );
      expect(cli.status).toBe(0);
      const viaCli = JSON.parse(cli.stdout) as CorpusReport;

      expect(viaBindings.utterances).toEqual(viaCli.utterances);
      expect(viaBindings.corpus).toEqual(viaCli.corpus);
      // meta matches too, apart from the echoed input paths
      const { config: _b, ...metaBindings } = viaBindings.meta;
      const { config: _c, ...metaCli } = viaCli.meta;
      expect(metaBindings).toEqual(metaCli);
    }
  });

  it("reports undefined categories as null in utterance records", () => {
    const hyps = readJsonl<HypothesisRecord>("diag_sys2.jsonl");
    const report = evaluate_corpus(refs, hyps);
    const noPrn = report.utterances.filter((u) => u.prn_total === 0);
    expect(noPrn.length).toBeGreaterThan(0);
    for (const record of noPrn) {
      expect(record.z_prn).toBeNull();
    }
  });

  it("rejects mixed hypothesis record shapes locally", () => {
    const hyps: HypothesisRecord[] = [
      { id: "diag-01", text: "x" },
      { id: "diag-02", tokens: ["x"] },
    ];
    expect(() => evaluate_corpus(refs.slice(0, 2), hyps)).toThrowError(
      /uniformly/,
    );
  });

  it("propagates unknown-id errors with the engine message", () => {
    expect(() =>
      evaluate_corpus(refs.slice(0, 1), [{ id: "nope", tokens: ["x"] }]),
    ).toThrowError(/nope/);
  });
});

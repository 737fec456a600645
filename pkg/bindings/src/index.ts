/**
 * Node bindings for the zscore disfluency-removal evaluation engine.
 *
 * Every call delegates to the installed `zscore` command line (override the
 * binary with the ZSCORE_BIN environment variable or the `bin` option) and
 * parses its JSON output, so the engine stays the single source of truth.
 * Undefined scores (a category absent from the reference) arrive as `null`.
 * The bindings hold no state; calls are safe to issue concurrently.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export type Tag = "EDITED" | "INTJ" | "PRN" | "NONE";

/** One reference utterance: parallel token/tag arrays. */
export interface ReferenceRecord {
  id: string;
  tokens: string[];
  tags: string[];
}

/** One hypothesis utterance: raw text, or tokens used verbatim. */
export type HypothesisRecord =
  | { id: string; text: string }
  | { id: string; tokens: string[] };

/** One row of an alignment table; hallucination rows have a null gt side. */
export interface AlignmentRow {
  gt_token: string | null;
  tag: Tag | null;
  hyp_token: string | null;
  hallucinated: boolean;
}

/** Per-utterance scores exactly as the engine reports them (null = NaN). */
export interface ScoreRecord {
  id: string;
  e_p: number | null;
  e_r: number | null;
  e_f: number | null;
  z_edited: number | null;
  z_intj: number | null;
  z_prn: number | null;
  tp: number;
  fp: number;
  fn: number;
  tn: number;
  edited_removed: number;
  edited_total: number;
  intj_removed: number;
  intj_total: number;
  prn_removed: number;
  prn_total: number;
  hallucinations: number;
}

export interface MacroStat {
  mean: number | null;
  std: number | null;
  defined_n: number;
}

export interface CorpusReport {
  meta: Record<string, unknown>;
  corpus: {
    macro?: Record<string, MacroStat>;
    micro?: Record<string, number | null>;
  };
  utterances: ScoreRecord[];
}

export interface EngineOptions {
  /** Decoration separator (default "§"); must not occur in any token. */
  separator?: string;
  /** Token comparison mode (default "sensitive"). */
  caseMode?: "sensitive" | "insensitive";
  /** Drop punctuation-only tokens from both sides before aligning. */
  excludePunct?: boolean;
  /** Path to the engine executable; overrides ZSCORE_BIN and "zscore". */
  bin?: string;
}

/** A nonzero engine exit: carries the exit code and the full stderr text. */
export class EngineError extends Error {
  constructor(
    message: string,
    readonly exitCode: number | null,
    readonly stderr: string,
  ) {
    super(message);
    this.name = "EngineError";
  }
}

function engineBin(options?: EngineOptions): string {
  return options?.bin ?? process.env.ZSCORE_BIN ?? "zscore";
}

function runEngine(args: string[], options?: EngineOptions): string {
  const result = spawnSync(engineBin(options), args, {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (result.error) {
    throw result.error; // e.g. ENOENT when the engine is not installed
  }
  if (result.status !== 0) {
    const stderr = result.stderr ?? "";
    const lines = stderr.trim().split("\n");
    const last = lines[lines.length - 1] ?? "";
    const message = last.replace(/^error:\s*/, "") || `engine exited with status ${result.status}`;
    throw new EngineError(message, result.status, stderr);
  }
  return result.stdout;
}

function commonArgs(options?: EngineOptions): string[] {
  const args: string[] = [];
  if (options?.separator !== undefined) {
    args.push("--separator", options.separator);
  }
  if (options?.caseMode !== undefined) {
    args.push("--case", options.caseMode);
  }
  if (options?.excludePunct) {
    args.push("--exclude-punct");
  }
  return args;
}

function toJsonl(records: unknown[]): string {
  return records.map((record) => JSON.stringify(record)).join("\n") + "\n";
}

function hypothesisMode(hyps: HypothesisRecord[]): "text" | "tokens" {
  const modes = new Set(hyps.map((h) => ("tokens" in h ? "tokens" : "text")));
  if (modes.size > 1) {
    throw new TypeError(
      "hypothesis records must be uniformly {text} or {tokens}",
    );
  }
  return modes.has("tokens") ? "tokens" : "text";
}

function withTempCorpus<T>(
  refs: ReferenceRecord[],
  hyps: HypothesisRecord[],
  run: (refPath: string, hypPath: string, hypMode: "text" | "tokens") => T,
): T {
  const dir = mkdtempSync(join(tmpdir(), "zscore-"));
  try {
    const refPath = join(dir, "ref.jsonl");
    const hypPath = join(dir, "hyp.jsonl");
    writeFileSync(refPath, toJsonl(refs), "utf8");
    writeFileSync(hypPath, toJsonl(hyps), "utf8");
    return run(refPath, hypPath, hypothesisMode(hyps));
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function toHypRecord(id: string, hyp: string | string[]): HypothesisRecord {
  return typeof hyp === "string" ? { id, text: hyp } : { id, tokens: hyp };
}

/** Engine version string (e.g. "0.1.0"); must match this package's own. */
export function version(options?: EngineOptions): string {
  const out = runEngine(["--version"], options).trim();
  const fields = out.split(/\s+/);
  return fields[fields.length - 1] ?? out;
}

/** Tokenize raw text with the engine's Treebank-style tokenizer. */
export function tokenize(text: string, options?: EngineOptions): string[] {
  const out = runEngine(["tokenize", "--", text], options);
  return JSON.parse(out) as string[];
}

/**
 * Align one tagged reference utterance with a hypothesis (raw text or
 * tokens) and return the alignment table rows.
 */
export function align(
  refTokens: string[],
  refTags: string[],
  hyp: string | string[],
  options?: EngineOptions,
): AlignmentRow[] {
  const refs = [{ id: "u0", tokens: refTokens, tags: refTags }];
  const hyps = [toHypRecord("u0", hyp)];
  const out = withTempCorpus(refs, hyps, (refPath, hypPath, hypMode) =>
    runEngine(
      [
        "align",
        "--ref", refPath,
        "--hyp", hypPath,
        "--hyp-mode", hypMode,
        "--id", "u0",
        "--json",
        ...commonArgs(options),
      ],
      options,
    ),
  );
  return (JSON.parse(out) as { rows: AlignmentRow[] }).rows;
}

/** Score one utterance pair; the record matches the engine's JSON report. */
export function score(
  refTokens: string[],
  refTags: string[],
  hyp: string | string[],
  options?: EngineOptions,
): ScoreRecord {
  const report = evaluate_corpus(
    [{ id: "u0", tokens: refTokens, tags: refTags }],
    [toHypRecord("u0", hyp)],
    options,
  );
  return report.utterances[0]!;
}

/**
 * Evaluate a whole corpus and return the engine's full report (meta echo,
 * macro/micro aggregates, per-utterance records). The hypothesis mode is
 * inferred from the records, which must be uniformly text or tokens.
 */
export function evaluate_corpus(
  refs: ReferenceRecord[],
  hyps: HypothesisRecord[],
  options?: EngineOptions,
): CorpusReport {
  const out = withTempCorpus(refs, hyps, (refPath, hypPath, hypMode) =>
    runEngine(
      [
        "eval",
        "--ref", refPath,
        "--hyp", hypPath,
        "--hyp-mode", hypMode,
        ...commonArgs(options),
      ],
      options,
    ),
  );
  return JSON.parse(out) as CorpusReport;
}

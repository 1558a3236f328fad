/**
 * Bindings for ML dataset pipelines over the `simready` CLI.
 *
 * Every function shells out to the CLI, so results are byte-identical to
 * running the corresponding command by hand; no codec or parser logic is
 * duplicated here. Set SIMREADY_BIN (or pass `cli` in the options) when the
 * executable is not on PATH.
 */

import { execFile } from 'node:child_process';
import { mkdtemp, readFile, readdir, rm, writeFile } from 'node:fs/promises';
import { tmpdir } from 'node:os';
import * as path from 'node:path';

export interface BindingOptions {
  /** CLI executable; defaults to $SIMREADY_BIN or "simready". */
  cli?: string;
}

/** Error category names mirror the core exception types. */
export type CoreErrorCategory =
  | 'InvalidInputError'
  | 'MalformedCodeError'
  | 'CodeParseError'
  | 'AssetError'
  | 'ExportError'
  | 'SimreadyError'
  | 'UsageError'
  | 'UnknownError';

export class CoreError extends Error {
  readonly category: CoreErrorCategory;
  readonly exitCode: number;
  readonly stderr: string;

  constructor(category: CoreErrorCategory, message: string,
              exitCode: number, stderr: string) {
    super(message);
    this.name = 'CoreError';
    this.category = category;
    this.exitCode = exitCode;
    this.stderr = stderr;
  }
}

export interface MaterialMapping {
  name: string;
  density: number;
  youngs_modulus: number;
  poisson_ratio: number;
}

export interface JointMapping {
  kind: 'FIXED' | 'REVOLUTE' | 'PRISMATIC' | 'CONTINUOUS';
  origin_m: [number, number, number];
  axis: [number, number, number];
  limit_lower: number | null;
  limit_upper: number | null;
}

export interface PartMapping {
  id: number;
  name: string;
  description: string;
  parent: number | null;
  material: MaterialMapping;
  affordance: number;
  joint: JointMapping;
  geometry: string;
}

export interface AssetMapping {
  category: string;
  description: string;
  scale_m: [number, number, number];
  deformable: boolean;
  parts: PartMapping[];
}

export interface BatchItem {
  assetId: string;
  code: string;
  tokenCount: number;
}

const CATEGORY_RE = /^error\[(\w+)\]: ([\s\S]*)$/;

function cliBin(options?: BindingOptions): string {
  return options?.cli ?? process.env.SIMREADY_BIN ?? 'simready';
}

function toCoreError(exitCode: number, stderr: string): CoreError {
  const text = stderr.trim();
  const match = CATEGORY_RE.exec(text);
  if (match) {
    const category = match[1] as CoreErrorCategory;
    return new CoreError(category, match[2], exitCode, stderr);
  }
  if (exitCode === 2) {
    return new CoreError('UsageError', text, exitCode, stderr);
  }
  const message = text.startsWith('error: ') ? text.slice(7) : text;
  return new CoreError(exitCode === 1 ? 'SimreadyError' : 'UnknownError',
                       message, exitCode, stderr);
}

/** Run the CLI, resolving with raw stdout bytes. */
export function runCli(args: string[],
                       options?: BindingOptions): Promise<Buffer> {
  return new Promise((resolve, reject) => {
    execFile(cliBin(options), args,
             { encoding: 'buffer', maxBuffer: 256 * 1024 * 1024 },
             (err, stdout, stderr) => {
      if (err) {
        const code = typeof (err as NodeJS.ErrnoException & { code?: unknown })
          .code === 'number' ? (err as unknown as { code: number }).code : 1;
        reject(toCoreError(code, stderr.toString('utf8')));
        return;
      }
      resolve(stdout);
    });
  });
}

async function withTempDir<T>(fn: (dir: string) => Promise<T>): Promise<T> {
  const dir = await mkdtemp(path.join(tmpdir(), 'simready-bind-'));
  try {
    return await fn(dir);
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

/**
 * Encode a grid to its code text. Accepts either the path of an .obj mesh
 * or grid-dump file, or the grid dump itself as bytes.
 */
export async function encode(input: string | Buffer,
                             options?: BindingOptions): Promise<string> {
  return withTempDir(async (dir) => {
    let inputPath: string;
    if (Buffer.isBuffer(input)) {
      inputPath = path.join(dir, 'input.grid.txt');
      await writeFile(inputPath, input);
    } else {
      inputPath = input;
    }
    const outPath = path.join(dir, 'out.code.txt');
    await runCli(['encode', inputPath, '-o', outPath], options);
    return readFile(outPath, 'utf8');
  });
}

/** Decode code text back to grid-dump bytes. */
export async function decode(codeText: string,
                             options?: BindingOptions): Promise<Buffer> {
  return withTempDir(async (dir) => {
    const codePath = path.join(dir, 'in.code.txt');
    const outPath = path.join(dir, 'out.grid.txt');
    await writeFile(codePath, codeText);
    await runCli(['decode', codePath, '-o', outPath], options);
    return readFile(outPath);
  });
}

/** Proxy token count of arbitrary text (whitespace and | separate tokens). */
export async function tokenCount(text: string,
                                 options?: BindingOptions): Promise<number> {
  return withTempDir(async (dir) => {
    const textPath = path.join(dir, 'text.txt');
    await writeFile(textPath, text);
    const stdout = await runCli(['tokens', textPath], options);
    return parseInt(stdout.toString('utf8').trim(), 10);
  });
}

/** Parse canonical asset text into a structured mapping. */
export async function parseAsset(assetText: string,
                                 options?: BindingOptions): Promise<AssetMapping> {
  return withTempDir(async (dir) => {
    const assetPath = path.join(dir, 'input.asset.txt');
    await writeFile(assetPath, assetText);
    const stdout = await runCli(['asset-json', assetPath], options);
    return JSON.parse(stdout.toString('utf8')) as AssetMapping;
  });
}

const BATCH_SUFFIXES = ['.grid.txt', '.obj'];

function batchStem(name: string): string | null {
  for (const suffix of BATCH_SUFFIXES) {
    if (name.endsWith(suffix)) {
      return name.slice(0, -suffix.length);
    }
  }
  return null;
}

/**
 * Encode every grid dump / mesh in a directory, yielding
 * (assetId, code text, token count) in file-name order.
 */
export async function* batch(dir: string, options?: BindingOptions):
    AsyncGenerator<BatchItem> {
  const names = (await readdir(dir)).sort();
  for (const name of names) {
    const stem = batchStem(name);
    if (stem === null) {
      continue;
    }
    const code = await encode(path.join(dir, name), options);
    const tokens = await tokenCount(code, options);
    yield { assetId: stem, code, tokenCount: tokens };
  }
}

import assert from 'node:assert/strict';
import { execFileSync } from 'node:child_process';
import { mkdtempSync, readFileSync, rmSync, writeFileSync, readdirSync } from 'node:fs';
import { tmpdir } from 'node:os';
import * as path from 'node:path';
import { test } from 'node:test';
import { fileURLToPath } from 'node:url';

import {
  CoreError,
  batch,
  decode,
  encode,
  parseAsset,
  tokenCount,
} from '../src/index.js';

const HERE = path.dirname(fileURLToPath(import.meta.url));
const FIXTURES = path.resolve(HERE, '..', '..', '..', 'fixtures');
const CLI = process.env.SIMREADY_BIN ?? 'simready';

function cliBytes(args: string[]): Buffer {
  return execFileSync(CLI, args, { maxBuffer: 256 * 1024 * 1024 });
}

/** Direct CLI invocation writing to its own temp output file. */
function cliFileOutput(args: (outPath: string) => string[],
                       outName: string): Buffer {
  const dir = mkdtempSync(path.join(tmpdir(), 'simready-cli-'));
  try {
    const outPath = path.join(dir, outName);
    execFileSync(CLI, args(outPath));
    return readFileSync(outPath);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function listFixtures(sub: string, suffix: string): string[] {
  return readdirSync(path.join(FIXTURES, sub))
    .filter((name) => name.endsWith(suffix))
    .sort()
    .map((name) => path.join(FIXTURES, sub, name));
}

test('tokenCount matches the documented example', async () => {
  assert.equal(await tokenCount('P4|E|E'), 3);
  assert.equal(await tokenCount('P4|T 0 4 12|D0 16'), 7);
});

test('encode parity across grid fixtures', async () => {
  for (const gridPath of listFixtures('grids', '.grid.txt')) {
    const viaBinding = await encode(gridPath);
    const viaCli = cliFileOutput(
      (out) => ['encode', gridPath, '-o', out], 'out.code.txt');
    assert.equal(viaBinding, viaCli.toString('utf8'), gridPath);
  }
});

test('encode accepts raw grid bytes', async () => {
  const gridPath = listFixtures('grids', '.grid.txt')[0];
  const fromBytes = await encode(readFileSync(gridPath));
  const fromPath = await encode(gridPath);
  assert.equal(fromBytes, fromPath);
});

test('encode parity across mesh fixtures', async () => {
  for (const objPath of listFixtures('meshes', '.obj')) {
    const viaBinding = await encode(objPath);
    const viaCli = cliFileOutput(
      (out) => ['encode', objPath, '-o', out], 'out.code.txt');
    assert.equal(viaBinding, viaCli.toString('utf8'), objPath);
  }
});

test('decode parity across code fixtures', async () => {
  for (const codePath of listFixtures('codes', '.code.txt')) {
    const codeText = readFileSync(codePath, 'utf8');
    const viaBinding = await decode(codeText);
    const viaCli = cliFileOutput(
      (out) => ['decode', codePath, '-o', out], 'out.grid.txt');
    assert.ok(viaBinding.equals(viaCli), codePath);
  }
});

test('decode inverts encode on fixtures', async () => {
  for (const gridPath of listFixtures('grids', '.grid.txt')) {
    const original = readFileSync(gridPath);
    const roundTripped = await decode(await encode(gridPath));
    assert.ok(roundTripped.equals(original), gridPath);
  }
});

test('parseAsset parity across the asset corpus', async () => {
  const assetPaths = listFixtures('assets', '.asset.txt');
  assert.equal(assetPaths.length, 10);
  for (const assetPath of assetPaths) {
    const text = readFileSync(assetPath, 'utf8');
    const mapping = await parseAsset(text);
    const direct = JSON.parse(
      cliBytes(['asset-json', assetPath]).toString('utf8'));
    assert.deepEqual(mapping, direct, assetPath);
  }
});

test('parseAsset exposes the tree structure', async () => {
  const cabinet = readFileSync(
    path.join(FIXTURES, 'assets', 'cabinet.asset.txt'), 'utf8');
  const asset = await parseAsset(cabinet);
  assert.equal(asset.category, 'cabinet');
  assert.equal(asset.parts.length, 2);
  assert.equal(asset.parts[1].joint.kind, 'REVOLUTE');
  assert.equal(asset.parts[1].parent, 0);
  assert.ok(asset.parts[0].geometry.startsWith('P64|'));
});

test('tokenCount parity across code fixtures', async () => {
  for (const codePath of listFixtures('codes', '.code.txt')) {
    const text = readFileSync(codePath, 'utf8');
    const viaBinding = await tokenCount(text);
    const viaCli = parseInt(
      cliBytes(['tokens', codePath]).toString('utf8').trim(), 10);
    assert.equal(viaBinding, viaCli, codePath);
  }
});

test('batch yields one item per grid/mesh with CLI-identical codes', async () => {
  const items = [];
  for await (const item of batch(path.join(FIXTURES, 'grids'))) {
    items.push(item);
  }
  assert.deepEqual(items.map((item) => item.assetId),
                   ['blob16', 'cube16_in_64', 'prism64']);
  for (const item of items) {
    const gridPath = path.join(FIXTURES, 'grids', `${item.assetId}.grid.txt`);
    const viaCli = cliFileOutput(
      (out) => ['encode', gridPath, '-o', out], 'out.code.txt');
    assert.equal(item.code, viaCli.toString('utf8'), item.assetId);
    assert.ok(item.tokenCount > 0);
  }
});

test('core errors surface with category and context', async () => {
  await assert.rejects(
    decode('P4|D0 16'),
    (err: unknown) => {
      assert.ok(err instanceof CoreError);
      assert.equal(err.category, 'CodeParseError');
      assert.match(err.message, /offset/);
      assert.equal(err.exitCode, 1);
      return true;
    });
});

test('invalid asset text raises an AssetError with field context', async () => {
  const cabinet = readFileSync(
    path.join(FIXTURES, 'assets', 'cabinet.asset.txt'), 'utf8');
  const broken = cabinet.replace('material.poisson_ratio: 0.3',
                                 'material.poisson_ratio: 0.7');
  await assert.rejects(
    parseAsset(broken),
    (err: unknown) => {
      assert.ok(err instanceof CoreError);
      assert.equal(err.category, 'AssetError');
      assert.match(err.message, /poisson_ratio/);
      return true;
    });
});

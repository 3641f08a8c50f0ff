// Test doubles backed by recorded wire fixtures. The fixtures are genuine
// responses captured from the query service (scripts/record_fixtures.py), so
// these tests exercise the real protocol without a live server.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { FetchLike, FetchResponseLike } from "../src/client.js";

const HERE = dirname(fileURLToPath(import.meta.url));

interface Fixture {
  status: number;
  body: unknown;
}

export function loadFixtures(name: string): Record<string, Fixture> {
  const raw = readFileSync(join(HERE, "fixtures", name), "utf-8");
  return JSON.parse(raw);
}

export function fixtureKey(url: string): string {
  const parsed = new URL(url, "http://fixture.local");
  const pairs = [...parsed.searchParams.entries()]
    .sort((a, b) => (a[0] === b[0] ? a[1].localeCompare(b[1])
                                   : a[0].localeCompare(b[0])));
  return parsed.pathname + JSON.stringify(pairs);
}

export class FakeFetch {
  calls: string[] = [];

  constructor(private fixtures: Record<string, Fixture>) {}

  get fn(): FetchLike {
    return (url: string) => this.dispatch(url);
  }

  private dispatch(url: string): Promise<FetchResponseLike> {
    this.calls.push(url);
    const key = fixtureKey(url);
    const fixture = this.fixtures[key];
    if (!fixture) {
      throw new Error(`no fixture recorded for ${key}`);
    }
    return Promise.resolve({
      ok: fixture.status >= 200 && fixture.status < 300,
      status: fixture.status,
      json: () => Promise.resolve(fixture.body),
    });
  }
}

export function mainFixtures(): Record<string, Fixture> {
  return loadFixtures("fixtures_main.json");
}

export function trustedFixtures(): Record<string, Fixture> {
  return loadFixtures("fixtures_trusted.json");
}

export function fixtureBody<T>(fixtures: Record<string, Fixture>,
                               key: string): T {
  const fixture = fixtures[key];
  if (!fixture) throw new Error(`missing fixture ${key}`);
  return fixture.body as T;
}

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

/** Parse a recorded API response from test/fixtures. The fixtures were
 *  captured from a live service over a trained bundle and are the contract
 *  the dashboard is tested against. */
export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf8")) as T;
}

export function rawFixture(name: string): string {
  return readFileSync(join(here, "fixtures", name), "utf8");
}

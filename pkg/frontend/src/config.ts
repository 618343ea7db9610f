/** The one knob the client exposes: where the solver service lives. */

export const DEFAULT_BASE_URL = "http://127.0.0.1:8211";

/**
 * Resolution order: an explicit `PRIVSHARE_BASE_URL` global (set by the
 * hosting page), the environment variable of the same name when running
 * under node, then the service's default local port.
 */
export function resolveBaseUrl(): string {
  const g = globalThis as Record<string, unknown>;
  if (typeof g.PRIVSHARE_BASE_URL === "string" && g.PRIVSHARE_BASE_URL !== "") {
    return g.PRIVSHARE_BASE_URL;
  }
  if (typeof process !== "undefined") {
    const fromEnv = process.env?.PRIVSHARE_BASE_URL;
    if (fromEnv) return fromEnv;
  }
  return DEFAULT_BASE_URL;
}

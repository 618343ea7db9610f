import { resolveBaseUrl } from "./config";
import type { Draft } from "./draft";
import { ExplorerSession } from "./session";
import { mountExplorer } from "./view";

// the bundled example instance: three interest categories with a $1 ceiling
const STARTER: Draft = {
  categories: ["sports", "politics", "technology"],
  q: [0.62, 0.27, 0.11],
  p: [0.259, 0.414, 0.327],
  w: [0.404, 0.044, 0.552],
};

const root = document.getElementById("app");
if (root !== null) {
  const session = new ExplorerSession({
    baseUrl: resolveBaseUrl(),
    draft: STARTER,
    mu: 0.5,
  });
  mountExplorer(root, session);
  session.refreshAll();
}

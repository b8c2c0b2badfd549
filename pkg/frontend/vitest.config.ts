import { defineConfig } from "vitest/config";

export default defineConfig({
  resolve: {
    // sources import sibling modules with .js suffixes (browser-native ESM);
    // point vitest back at the .ts files
    alias: [{ find: /^(\.{1,2}\/.*)\.js$/, replacement: "$1" }],
  },
  test: {
    environment: "node",
    testTimeout: 120_000,
    hookTimeout: 60_000,
  },
});

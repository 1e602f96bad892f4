import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // The e2e file spawns a real gateway process per suite.
    testTimeout: 30_000,
    hookTimeout: 60_000,
    pool: "forks",
  },
});

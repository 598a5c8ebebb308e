import { readFileSync } from "fs";
import { join } from "path";

import { describe, expect, it } from "vitest";

import { loadManifest } from "../src/manifest";
import { SchemaError, manifestSchema, plotsFileSchema } from "../src/schema";

const ROOT = join(__dirname, "..");
const GOLDEN = join(ROOT, "golden");

describe("plotsFileSchema", () => {
  it("accepts the shipped spec", () => {
    const obj = JSON.parse(readFileSync(join(ROOT, "plots.json"), "utf-8"));
    const parsed = plotsFileSchema.parse(obj);
    expect(parsed.plots).toHaveLength(4);
    expect(parsed.plots.map((p) => p.kind)).toEqual([
      "loglog_scaling",
      "loglog_scaling",
      "loglog_scaling",
      "fidelity_time",
    ]);
  });

  it("rejects an unknown plot kind", () => {
    const bad = {
      plots: [{ kind: "pie", curves: [{ csv: "x.csv" }], manifest: "m.json", output: "o" }],
    };
    expect(plotsFileSchema.safeParse(bad).success).toBe(false);
  });

  it("requires a manifest per plot", () => {
    const bad = {
      plots: [{ kind: "loglog_scaling", curves: [{ csv: "x.csv" }], output: "o" }],
    };
    const res = plotsFileSchema.safeParse(bad);
    expect(res.success).toBe(false);
  });

  it("requires at least one curve", () => {
    const bad = {
      plots: [{ kind: "fidelity_time", curves: [], manifest: "m.json", output: "o" }],
    };
    expect(plotsFileSchema.safeParse(bad).success).toBe(false);
  });
});

describe("manifestSchema", () => {
  it("accepts the shipped run manifests", () => {
    for (const name of [
      "scaling_ising_u1.manifest.json",
      "scaling_xxz_u3-nested.manifest.json",
      "fidelity_xxz_l1_pf.manifest.json",
    ]) {
      const m = loadManifest(join(GOLDEN, name));
      expect(m.config_hash).toMatch(/^[0-9a-f]{64}$/);
      expect(m.versions.dacqc).toBeTruthy();
    }
  });

  it("keeps fit numbers exactly as written", () => {
    const m = loadManifest(join(GOLDEN, "scaling_ising_u1.manifest.json"));
    const fit = m.fits?.[0];
    expect(fit).toBeDefined();
    expect(fit!.exact).toBe(false);
    expect(fit!.nu).toBeCloseTo(1.4987277417681946, 12);
  });

  it("rejects a malformed config hash", () => {
    const obj = JSON.parse(
      readFileSync(join(GOLDEN, "scaling_ising_u1.manifest.json"), "utf-8")
    );
    obj.config_hash = "nothex";
    expect(manifestSchema.safeParse(obj).success).toBe(false);
  });

  it("raises SchemaError for broken JSON", () => {
    expect(() => loadManifest(join(GOLDEN, "scaling_ising_u1.csv"))).toThrow(SchemaError);
  });
});

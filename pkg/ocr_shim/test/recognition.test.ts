import { execFileSync } from "child_process";
import * as fs from "fs";
import * as path from "path";
import { describe, expect, it } from "vitest";

import { DEFAULT_CONFIG, DIST_MAIN, generateCorpus, mkdtemp } from "./helpers";

/**
 * End-to-end recognition quality: the harness CLI drives this shim over the
 * subprocess transport for 20 images rendered with the default settings
 * (24 px text, rotation up to +/-10 degrees); the engine must stay under
 * 10% CER against ground truth.
 */
describe("recognition quality through the harness", () => {
    it("achieves CER < 10% on 20 rendered corpus images", () => {
        const corpus = generateCorpus(20);
        const workDir = mkdtemp("shimeval-");
        const backendConfig = path.join(workDir, "backend.json");
        fs.writeFileSync(backendConfig, JSON.stringify({
            type: "subprocess",
            argv: ["node", DIST_MAIN, "--config", DEFAULT_CONFIG],
            timeout_s: 300,
        }));
        const outDir = path.join(workDir, "ocr-eval");
        execFileSync("python3", [
            "-m", "timtbench.cli", "ocr-eval",
            "--manifest", path.join(corpus, "manifest.jsonl"),
            "--backend", backendConfig,
            "--lang-side", "src",
            "--engine-name", "tesseract",
            "--seed", "0",
            "--out", outDir,
        ], { stdio: ["ignore", "inherit", "inherit"] });

        const cerReport = JSON.parse(
            fs.readFileSync(path.join(outDir, "tesseract.en.cer.json"), "utf-8"),
        );
        const werReport = JSON.parse(
            fs.readFileSync(path.join(outDir, "tesseract.en.wer.json"), "utf-8"),
        );
        expect(cerReport.details.failed_requests).toBe(0);
        expect(cerReport.ids).toHaveLength(20);
        expect(cerReport.corpus_score).toBeLessThan(10.0);
        expect(werReport.corpus_score).toBeLessThan(40.0);
    }, 600_000);
});

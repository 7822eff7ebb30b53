import { ChildProcessWithoutNullStreams, execFileSync, spawn } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import * as readline from "readline";

export const SHIM_ROOT = path.resolve(__dirname, "..");
export const DIST_MAIN = path.join(SHIM_ROOT, "dist", "main.js");
export const DEFAULT_CONFIG = path.join(SHIM_ROOT, "config", "default.json");

/** Line-oriented client around a spawned shim process. */
export class ShimClient {
    readonly proc: ChildProcessWithoutNullStreams;
    private readonly lines: AsyncIterator<string>;
    readonly stderr: string[] = [];

    constructor(args: string[] = ["--config", DEFAULT_CONFIG]) {
        this.proc = spawn("node", [DIST_MAIN, ...args], { stdio: "pipe" });
        const rl = readline.createInterface({ input: this.proc.stdout });
        this.lines = rl[Symbol.asyncIterator]();
        readline.createInterface({ input: this.proc.stderr })
            .on("line", (line) => this.stderr.push(line));
    }

    sendRaw(line: string): void {
        this.proc.stdin.write(`${line}\n`);
    }

    async nextLine(): Promise<string> {
        const item = await this.lines.next();
        if (item.done) {
            throw new Error(`shim stdout closed; stderr:\n${this.stderr.join("\n")}`);
        }
        return item.value;
    }

    async request(body: unknown): Promise<Record<string, unknown>> {
        this.sendRaw(JSON.stringify(body));
        return JSON.parse(await this.nextLine());
    }

    /** Close stdin and wait for the exit code. */
    async shutdown(): Promise<number> {
        this.proc.stdin.end();
        return new Promise((resolve) => {
            this.proc.on("exit", (code) => resolve(code ?? -1));
        });
    }

    kill(): void {
        this.proc.kill();
    }
}

export function mkdtemp(prefix: string): string {
    return fs.mkdtempSync(path.join(os.tmpdir(), prefix));
}

/** Render a small corpus through the harness CLI; returns the corpus dir. */
export function generateCorpus(lineCount: number, renderSpec?: Record<string, unknown>): string {
    const dir = mkdtemp("shimtest-");
    const src: string[] = [];
    const tgt: string[] = [];
    const nouns = ["market", "garden", "river", "station", "letter", "window", "road", "child"];
    for (let i = 0; i < lineCount; i += 1) {
        const a = nouns[i % nouns.length];
        const b = nouns[(i + 3) % nouns.length];
        src.push(`The quick brown fox visits the ${a} near the old ${b} today.`);
        tgt.push(`Der schnelle braune Fuchs besucht heute den ${a} am alten ${b}.`);
    }
    fs.writeFileSync(path.join(dir, "src.txt"), `${src.join("\n")}\n`);
    fs.writeFileSync(path.join(dir, "tgt.txt"), `${tgt.join("\n")}\n`);
    const args = [
        "-m", "timtbench.cli", "gen",
        "--src", path.join(dir, "src.txt"),
        "--tgt", path.join(dir, "tgt.txt"),
        "--src-lang", "en", "--tgt-lang", "de",
        "--split", "test", "--seed", "17",
        "--out", path.join(dir, "corpus"),
    ];
    if (renderSpec) {
        const specPath = path.join(dir, "spec.json");
        fs.writeFileSync(specPath, JSON.stringify(renderSpec));
        args.push("--spec", specPath);
    }
    execFileSync("python3", args, { stdio: ["ignore", "ignore", "inherit"] });
    return path.join(dir, "corpus");
}

export function manifestImagePaths(corpusDir: string): { id: string; image: string; text: string }[] {
    const lines = fs.readFileSync(path.join(corpusDir, "manifest.jsonl"), "utf-8")
        .split("\n").filter((line) => line.trim());
    const out: { id: string; image: string; text: string }[] = [];
    for (const line of lines.slice(1)) {
        const record = JSON.parse(line);
        out.push({
            id: record.id,
            image: path.join(corpusDir, record.src_image_path),
            text: record.src_text,
        });
    }
    return out;
}

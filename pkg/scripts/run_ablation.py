"""Desk-scale ablation: 6 stand-in problems, d=10, 20 environments, 10 paired runs.

Prints the table of per-cell means and the three ordering checks. Writes
results.csv / summary.csv when --out is given.

    python scripts/run_ablation.py --out results/ablation
"""
import argparse
import time
from pathlib import Path

from driftopt.config import load_config
from driftopt.harness import format_table, run_experiment, summarize, write_results_csv, write_summary_csv

HERE = Path(__file__).resolve().parent


def ordering_checks(report):
    """Counts of problems on which each ablation step helps."""
    probs = report.problems
    c = report.cells
    kts = sum(c[p, "KTS"] < c[p, "SS"] for p in probs)
    pi = sum(c[p, "KTSPI"] < c[p, "KTS"] for p in probs)
    tba = sum(c[p, "KTSPI_TBA"] <= c[p, "KTSPI"] * 1.01 for p in probs)
    return {"KTS < SS": (kts, 4), "KTSPI < KTS": (pi, 4), "KTSPI-TBA <= 1.01 KTSPI": (tba, 3)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=HERE.parent / "configs" / "ablation_desk.json")
    ap.add_argument("--parallelism", type=int, default=1)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    cfg = load_config(args.config)
    start = time.perf_counter()
    report = run_experiment(cfg, parallelism=args.parallelism)
    elapsed = time.perf_counter() - start
    rows = summarize(report.records)
    print(format_table(rows, cfg.problems, cfg.variants))
    for p in cfg.problems:
        print(p, "  ".join(f"{v}={report.cell(p, v)!r}" for v in cfg.variants))
    for name, (count, need) in ordering_checks(report).items():
        print(f"{'PASS' if count >= need else 'FAIL'}  {name}: {count}/{len(cfg.problems)} (need {need})")
    print(f"elapsed {elapsed:.1f}s")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        with open(args.out / "results.csv", "w", newline="") as fh:
            write_results_csv(report.records, fh)
        with open(args.out / "summary.csv", "w", newline="") as fh:
            write_summary_csv(rows, fh)


if __name__ == "__main__":
    main()

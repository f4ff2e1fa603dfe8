"""Generate random instances and benchmark the relaxation families on them.

Uses the bounded ("figures") setting Q0 = I - sum(Q_i) so every relaxation
has a finite value, then reports per-instance bounds and the improvement
ratio of the split-based family over plain RLT.
"""

from qrelax import GenSpec, compare, generate
from qrelax.bench import report_csv, sweep_seed

reports = []
print(f"{'instance':>28s} {'rlt':>12s} {'gsrt-a':>12s} {'gsrt-b':>12s} {'improv':>9s}")
for rep_idx in range(5):
    spec = GenSpec(n=8, l=3, k=0, m=4, phi=4, figures_mode=True,
                   seed=sweep_seed(123, 4, rep_idx))
    inst = generate(spec)
    report = compare(inst, ["rlt", "gsrt-a", "gsrt-b"])
    b = report.bounds()
    ratio = report.improvement_ratio
    print(f"{inst.name:>28s} {b['rlt']:12.3f} {b['gsrt-a']:12.3f} {b['gsrt-b']:12.3f} "
          f"{ratio if ratio is not None else float('nan'):9.2%}")
    if report.dominance_violations:
        print("  !! ordering violated:", report.dominance_violations)
    reports.append(report)

print("\nCSV of the full run:")
print(report_csv(reports))

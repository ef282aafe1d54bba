"""Cross-validated comparison of distances on two UCI datasets."""

from pathlib import Path

import numpy as np

from choquetknn import BenchReport, cross_validate, load_csv

data = Path(__file__).resolve().parents[1] / "tests" / "data"
roster = ["MAN", "MI", "MAH1", "WFR", "CFR", "CFR.5", "CFR1"]
reports = [cross_validate(load_csv(data / f"{n}.csv"), roster, name=n) for n in ("iris", "wisconsin")]
for rep in reports:
    print(rep.dataset, {d: round(v, 3) for d, v in rep.means.items()})

bench = BenchReport(reports)
print("mean:", {d: round(v, 3) for d, v in bench.mean_row().items()})

# Fold-level signed-rank p-values, CFR.5 against MAN
rep = reports[1]
p = np.array(rep.pvalues())
print("wisconsin p(CFR.5 vs MAN) =", p[rep.distances.index("CFR.5"), rep.distances.index("MAN")])

"""KNN accuracy near the class boundary as redundant columns pile up."""

# Train on 500 uniform points labelled by a1 >= a2 and test on points close
# to the diagonal. Copies of a2 pull Manhattan distance toward a2 alone; the
# fuzzy-rough Choquet distance ignores them. A smaller run is used here, see
# `choquet-knn synthetic` for the full grid.

from choquetknn.experiments import run_synthetic

rows = run_synthetic("duplicates", [0, 2, 5, 10], n_test=2000)
table = {}
for r in rows:
    table.setdefault(r.distance, []).append(r.accuracy)
print("m       " + "".join(f"{m:>8d}" for m in (0, 2, 5, 10)))
for name, accs in table.items():
    print(f"{name:8s}" + "".join(f"{a:8.3f}" for a in accs))

# Noisy copies (sigma = 0.1) carry a little information each, which mutual
# information weights pick up.
rows = run_synthetic("correlated", [0, 5, 10], ["MAN", "MI"], n_test=2000)
for r in rows:
    print(r.kind, r.m, r.distance, round(r.accuracy, 3))

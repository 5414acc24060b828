"""Regenerate the bundled datasets in src/lohi/data/.

Networks come from the copies shipped with networkx, feature tables from
scikit-learn. Both libraries are only needed to run this script.
"""
import csv
from pathlib import Path

import networkx as nx
from sklearn import datasets

OUT = Path(__file__).resolve().parents[1] / "src" / "lohi" / "data"


def write_edges(path, G, weighted, header):
    with open(path, "w") as fh:
        fh.write(f"# {header}\n")
        for u, v, d in G.edges(data=True):
            u, v = (str(x).replace(" ", "_") for x in (u, v))
            fh.write(f"{u} {v} {d['weight']}\n" if weighted else f"{u} {v}\n")


def write_table(path, bunch, class_name="class"):
    cols = [f"f{j}" for j in range(bunch.data.shape[1])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols + [class_name])
        for row, y in zip(bunch.data, bunch.target):
            w.writerow([repr(float(x)) for x in row] + [int(y)])


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    write_edges(OUT / "karate.edges", nx.karate_club_graph(), True,
                "Zachary karate club; third column = interaction count")
    write_edges(OUT / "lesmis.edges", nx.les_miserables_graph(), False,
                "Les Miserables character co-occurrence (unweighted)")
    write_edges(OUT / "florentine.edges", nx.florentine_families_graph(), False,
                "Florentine families marriage network")
    write_edges(OUT / "davis.edges", nx.davis_southern_women_graph(), False,
                "Davis southern women / events bipartite network")
    for name, loader in [("iris", datasets.load_iris), ("wine", datasets.load_wine),
                         ("breast_cancer", datasets.load_breast_cancer),
                         ("digits", datasets.load_digits)]:
        write_table(OUT / f"{name}.csv", loader())

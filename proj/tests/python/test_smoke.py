"""Smoke tests for the python bindings."""

import math
import sys

import dynoclust as dc


def test_reparam():
    q, tau = dc.reparam(0.04, 6.8, 1.01)
    assert abs(q - 0.04 / 6.8) < 1e-12
    assert abs(tau - 1.068 / 5.8) < 1e-12
    try:
        dc.reparam(1.0, 0.5, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("t_q <= 1 must be rejected")


def test_gamma():
    assert dc.gamma_of(2.0, 3, 0.5) == 0.5
    assert dc.gamma_of(3.0, 2, math.inf) == 0.0


def test_generators_deterministic():
    a = dc.generate_gaussians(clusters=3, steps=4, seed=9)
    b = dc.generate_gaussians(clusters=3, steps=4, seed=9)
    assert a == b
    batches, truth = a
    assert len(batches) == 4
    assert len(batches[0]) == 45
    assert len(truth[0]) == 45

    rings, ring_truth = dc.generate_rings(pts_per_step=60, steps=2, seed=3)
    assert len(rings[0]) == 60
    assert sorted(set(ring_truth[0])) == [0, 1, 2]


def test_cluster_separated_blobs():
    # Two far-apart blobs drifting slowly: dmeans must track them perfectly.
    stream = []
    truth = []
    import random

    rng = random.Random(4)
    centers = [(0.0, 0.0), (5.0, 5.0)]
    for _ in range(6):
        batch = []
        labels = []
        for cid, (cx, cy) in enumerate(centers):
            for _ in range(10):
                batch.append([cx + 0.05 * rng.gauss(0, 1), cy + 0.05 * rng.gauss(0, 1)])
                labels.append(cid)
        stream.append(batch)
        truth.append(labels)
        centers = [(cx + 0.01, cy) for cx, cy in centers]

    out = dc.cluster_stream("dmeans", stream, lambda_=1.0, t_q=5.0, k_tau=1.1, restarts=2)
    assert len(out["labels"]) == 6
    score = dc.consistent_accuracy(out["labels"], truth)
    assert score["overall"] == 1.0

    out2 = dc.cluster_stream("dmeans", stream, lambda_=1.0, t_q=5.0, k_tau=1.1, restarts=2)
    assert out["labels"] == out2["labels"]
    assert out["objectives"] == out2["objectives"]


def test_kernelized_engines_run():
    batches, truth = dc.generate_gaussians(clusters=2, pts_per_cluster=8, steps=3, seed=5)
    kd = dc.cluster_stream("kdmeans", batches, lambda_=0.5, q=0.05, tau=0.5,
                           kernel="rbf", omega=0.2, budget=8)
    assert len(kd["labels"]) == 3
    sd = dc.cluster_stream("sdmeans", batches, lambda_=4.0, q=0.4, tau=1.0,
                           kernel="rbf", omega=0.15, budget=8)
    assert len(sd["labels"]) == 3
    # A kernel on dmeans (or a missing kernel on sdmeans) is a config error.
    try:
        dc.cluster_stream("sdmeans", batches, lambda_=4.0, q=0.4, tau=1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("missing kernel must be rejected")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())

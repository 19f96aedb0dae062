"""Estimated class count against the number of detectable classes on k-class graphs."""
import argparse

from bhcd import (AlgorithmOptions, DcsbmParams, ThetaDistribution, algorithm1, detectable_count,
                  recovery_metric, sample_dcsbm)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--c-out", type=float, default=5.0)
    ap.add_argument("--c-in", type=float, nargs="+", default=[8, 12, 16, 20])
    ap.add_argument("--f", type=float, default=1.5)
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()
    th = ThetaDistribution.powerlaw(3, 13, 4)
    print("c_in   k_d  k_hat per seed        mean recovery")
    for c_in in args.c_in:
        hats, rec, k_d = [], [], None
        for seed in range(args.seeds):
            p = DcsbmParams.from_dict(dict(n=args.n, k=args.k, c_in=c_in, c_out=args.c_out, f=args.f,
                                           theta=th.to_dict(), seed=seed))
            k_d = detectable_count(p.C, p.pi, th.phi)
            k_hat = algorithm1(sample_dcsbm(p).graph, AlgorithmOptions(seed=seed)).k_hat
            hats.append(k_hat)
            rec.append(recovery_metric(k_hat, k_d))
        print(f"{c_in:<6.4g} {k_d:<4} {str(hats):<21} {sum(rec) / len(rec):+.3f}")


if __name__ == "__main__":
    main()

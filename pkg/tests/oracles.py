"""Brute-force reference implementations, written independently of the package."""


def contingency_loop(truth_vals, truth_valid, pred_vals, pred_valid, threshold=0.0):
    hits = misses = fa = cn = 0
    for i in range(len(truth_vals)):
        for j in range(len(truth_vals[0])):
            if not (truth_valid[i][j] and pred_valid[i][j]):
                continue
            t = truth_vals[i][j] > threshold
            p = pred_vals[i][j] > threshold
            if t and p:
                hits += 1
            elif t:
                misses += 1
            elif p:
                fa += 1
            else:
                cn += 1
    return hits, misses, fa, cn


def scores_loop(hits, misses, fa):
    pod = hits / (hits + misses) if hits + misses else None
    far = fa / (hits + fa) if hits + fa else None
    ts = hits / (hits + misses + fa) if hits + misses + fa else None
    return pod, far, ts


def ecdf_loop(samples, x):
    return sum(1 for s in samples if s <= x) / len(samples)


def ks_loop(a, b):
    d = 0.0
    for x in list(a) + list(b):
        d = max(d, abs(ecdf_loop(a, x) - ecdf_loop(b, x)))
    return d


def rank_cdf(scores):
    """CDF value after each distinct score, by sorting and counting ranks."""
    s = sorted(scores)
    out = {}
    for k, v in enumerate(s):
        out[v] = (k + 1) / len(s)
    return sorted(out.items())

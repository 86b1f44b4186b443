"""A one-dimensional quasicrystal from Z[sqrt 2] and how ring-like it is.

Points a + b sqrt 2 are kept when their Galois conjugate a - b sqrt 2 lies in
a window [-w, w].  The result is uniformly discrete, yet sums and products of
points stay within a bounded number of translates of the cloud.
"""

from __future__ import annotations

from approxring.cutproject import approx_check_cloud, cloud_stats, pisot_window, window_commensurability


def main() -> None:
    for w in (1, 2):
        cloud = pisot_window(2, w, 100)
        s = cloud_stats(cloud)
        print(
            f"window {w}: {len(cloud)} points in [-100,100], min gap {s['min_gap']:.4f}, "
            f"max gap {s['max_gap']:.4f}, covering radius {s['covering_radius']:.4f}"
        )

    cloud = pisot_window(2, 1, 100)
    cert = approx_check_cloud(cloud, 50)
    print(f"\nSums and products of the inner points (|x| <= 50) need {cert.K} translates of the cloud")

    a, b = window_commensurability(2, 1, 2, 50, 10)
    print(f"Windows 1 and 2 are commensurable: {a.K} and {b.K} translates in the two directions")


if __name__ == "__main__":
    main()

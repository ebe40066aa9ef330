"""Regenerate special_fn.csv: python3 gen_special.py > special_fn.csv"""
import random
import mpmath as mp

mp.mp.dps = 40
rng = random.Random(20240611)


def points():
    regions = [
        (0.05, 30.0, -30.0, 30.0, 500),  # right half-plane
        (-12.0, -0.05, -8.0, 8.0, 300),  # left half-plane (reflection)
        (0.05, 3.0, -1.0, 1.0, 100),     # near the origin
        (-60.0, 60.0, 30.0, 80.0, 100),  # large imaginary part
    ]
    for x0, x1, y0, y1, count in regions:
        k = 0
        while k < count:
            x, y = rng.uniform(x0, x1), rng.uniform(y0, y1)
            # keep away from poles
            if y == 0 or (x < 0 and abs(y) < 0.05 and abs(x - round(x)) < 0.05):
                continue
            yield mp.mpc(x, y)
            k += 1


print(f"# lnGamma, psi, psi1, psi2 from mpmath {mp.__version__} at {mp.mp.dps} digits; seed 20240611")
print("re,im,lg_re,lg_im,psi_re,psi_im,psi1_re,psi1_im,psi2_re,psi2_im")
for z in points():
    vals = [mp.loggamma(z), mp.digamma(z), mp.polygamma(1, z), mp.polygamma(2, z)]
    cols = [z.real, z.imag] + [c for v in vals for c in (v.real, v.imag)]
    print(",".join(repr(float(c)) for c in cols))

"""Dev-time oracle: recompute the frozen reference values used in the test suite.

Runs at 50 digits with mpmath, independent of the shipped special functions.
Output is a plain listing that was pasted into tests/oracle_values.py.
"""
import mpmath as mp

mp.mp.dps = 50


def show(name, value):
    print(f"{name} = {mp.nstr(value, 20)}")


def main():
    show("GAMMA_RATIO_225_175", mp.gamma(2.25) / mp.gamma(1.75))
    show("D_LAMBDA_025", 2 ** mp.mpf(0.5) * mp.gamma(0.75) / mp.gamma(0.25))
    show("C_LAMBDA_03", 2 ** mp.mpf(0.6) * mp.gamma(0.3) / mp.gamma(-0.3))
    show("HYP2F1_08_18_15_M37", mp.hyp2f1(0.8, 1.8, 1.5, -3.7))
    for a, b, c in [(0.7, 1.3, 1.9), (2.35, 0.45, 1.1), (1.8, 2.2, 3.5)]:
        show(f"HYP2F1_{a}_{b}_{c}_M1", mp.hyp2f1(a, b, c, -1))
    mu, lam = mp.mpf(1.5), mp.mpf(1.5)
    F = mp.gamma(mu + 0.5 + lam) / mp.gamma(mu + 0.5 - lam)
    show("Q_N3_K1", -F * (mp.digamma(mu + 0.5 + lam) + mp.digamma(mu + 0.5 - lam)))
    show("DTN_XI2_LAM03_NEG", -(mp.mpf(2) ** mp.mpf(0.6)))
    show("SPHERE_N3_K1_LAM03", mp.gamma(2.3) / mp.gamma(1.7))
    show("SPHERE_N2_K2_LAM025", mp.gamma(2.75) / mp.gamma(2.25))
    # Kummer/Tricomi reference points (V is Tricomi's U)
    for a, b, t in [(0.3, 1.6, 0.05), (1.3, 1.6, 2.5), (1.1, 1.2, 17.0), (0.1, 1.2, 0.7)]:
        show(f"KUMMER_V_{a}_{b}_{t}", mp.hyperu(a, b, t))
        show(f"KUMMER_M_{a}_{b}_{t}", mp.hyp1f1(a, b, t))


if __name__ == "__main__":
    main()

"""Reference values frozen from scripts/pin_oracles.py (50-digit mpmath)."""

GAMMA_RATIO_225_175 = 1.2327812996619328718
D_LAMBDA_025 = 0.47798879748612499536
C_LAMBDA_03 = -1.047960875115015084
HYP2F1_08_18_15_M37 = 0.24101044606431974817
HYP2F1_AT_MINUS_ONE = {
    (0.7, 1.3, 1.9): 0.70695808997514776416,
    (2.35, 0.45, 1.1): 0.55394459034889551895,
    (1.8, 2.2, 3.5): 0.43944621791741723912,
}
Q_N3_K1 = 1.6131625975803380479
DTN_XI2_LAM03_NEG = -1.515716566510398059
SPHERE_N3_K1_LAM03 = 1.2840217602594082748
SPHERE_N2_K2_LAM025 = 1.4195543041412979309
# (a, b, t): (V, M)
KUMMER = {
    (0.3, 1.6, 0.05): (3.7522519855895730609, 1.0094934466061396737),
    (1.3, 1.6, 2.5): (0.23644790151428274972, 8.7496731950286212659),
    (1.1, 1.2, 17.0): (0.04198925688762783755, 17550094.740977417213),
    (0.1, 1.2, 0.7): (1.0465567607143761037, 1.070331346961020011),
}

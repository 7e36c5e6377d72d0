"""Printed reference values (four decimals) for the N = 4 benchmark rates."""

TABLE1_RATES = dict(alpha=0.23, beta=0.32, gamma=0.47, delta=0.6, q=0.1, n_sites=4)
CLASS_BASE = dict(alpha=0.23, beta=0.32, gamma=0.17, q=0.5, n_sites=4)

TABLE1_PARAMS = (1.5466, 1.3055, -0.3164, -0.4085)
# (a, b, c, d) at classes M = 1..4; only b and d depend on M
CLASS_PARAMS = {
    1: (2.7974, 5.5673, -0.4836, -0.5311),
    2: (2.7974, 2.5891, -0.4836, -0.5710),
    3: (2.7974, 1.1511, -0.4836, -0.6421),
    4: (2.7974, 0.4974, -0.4836, -0.7429),
}

# kind I root sets (three roots) with their energies
TABLE1_ROWS = [
    ((0.9702 - 0.9849j, 0.0166 + 0.1513j, 0.3762 + 0.4221j), -3.2590 + 0.5999j),
    ((0.3762 - 0.4221j, 0.9702 + 0.9849j, 0.0717 + 0.6529j), -3.2590 - 0.5999j),
    ((2.3555 - 0.9589j, 2.2560 - 0.0000j, 2.3555 + 0.9589j), -0.2634),
    ((1.7812 - 0.8533j, 0.1683 - 0.6900j, 0.3323 + 0.6834j), -2.4104 + 0.3628j),
    ((0.3323 - 0.6834j, 0.1683 + 0.6900j, 1.7812 + 0.8533j), -2.4104 - 0.3628j),
    ((-0.2418 - 0.9907j, 2.2672 - 0.4367j, 1.5293 - 1.6967j), -1.3430 + 0.8503j),
    ((-0.2418 + 0.9907j, 2.2672 + 0.4367j, 1.5293 + 1.6967j), -1.3430 - 0.8503j),
    ((0.2413 + 0.6866j, 0.2413 - 0.6866j, 2.0174 - 0.0000j), -2.0913),
    ((0.0314 - 1.2867j, 2.2162 - 0.1875j, 2.2462 + 0.5359j), -0.7852 + 0.2111j),
    ((2.2162 + 0.1875j, 0.0314 + 1.2867j, 2.2462 - 0.5359j), -0.7852 - 0.2111j),
    ((2.2388 + 0.3399j, 1.7052 - 1.5918j, -0.1620 - 1.0905j), -1.2358 + 0.5220j),
    ((2.2388 - 0.3399j, 1.7052 + 1.5918j, -0.1620 + 1.0905j), -1.2358 - 0.5220j),
    ((0.2499 - 1.3356j, 2.0462 - 1.1818j, 0.9432 + 1.5458j), -1.6171 + 0.2869j),
    ((2.0462 + 1.1818j, 0.9432 - 1.5458j, 0.2499 + 1.3356j), -1.6171 - 0.2869j),
    ((0.5919 - 1.4077j, 0.5919 + 1.4077j, 2.1651 + 0.0000j), -1.3044),
]
TABLE1_ENERGIES = [e for _, e in TABLE1_ROWS] + [0.0]

# class M = 1: kind III root pairs, then kind IV single roots
TABLE2_III = [
    ((0.6968 + 0.1206j, 0.5683 - 0.4208j), -2.8518),
    ((3.9600 + 0.0000j, 0.6991 - 0.1064j), -2.3998),
    ((0.3414 + 0.0000j, 0.7039 + 0.0669j), -2.0923),
    ((3.7661 + 0.0000j, 0.6575 + 0.2602j), -1.6596),
    ((0.6739 - 0.2140j, 1.6342 + 0.0000j), -1.5453),
    ((0.2671 - 0.0215j, 0.2671 + 0.0215j), -0.3180),
    ((0.6623 - 0.9669j, 0.2411 - 0.3520j), -1.0991),
    ((0.3507 + 0.6140j, 2.7996 + 0.0000j), -0.9242),
    ((5.8061 - 0.0000j, 1.8539 - 0.0000j), -0.5230),
    ((1.7541 + 0.0000j, 0.4337 - 0.5585j), -0.7826),
    ((0.0778 - 0.0000j, 2.1292 + 0.0000j), -0.6020),
]
TABLE2_IV = [
    ((0.7026 + 0.0797j,), -1.7579),
    ((0.1795 + 0.6839j,), -0.1461),
    ((0.6843 - 0.1781j,), -1.2688),
    ((0.6229 + 0.3347j,), -0.6554),
]

TABLE3_III = [
    ((0.6984 - 0.1104j,), -2.5526),
    ((0.6497 - 0.2790j,), -1.7676),
    ((0.0614 + 0.7044j,), -1.0575),
    ((0.2897 - 0.0000j,), -0.6133),
    ((0.2284 - 0.0000j,), -0.7549),
]
TABLE3_IV = [
    ((0.6773 + 0.2031j, 0.7020 - 0.0847j), -2.8832),
    ((0.5332 + 0.4644j, 0.7024 + 0.0812j), -2.1364),
    ((0.2828 - 0.6481j, 12.8949 - 0.0000j), -0.1638),
    ((0.7030 + 0.0762j, 10.6140 + 0.0000j), -1.7543),
    ((0.6817 + 0.1877j, 0.5411 - 0.4552j), -1.6196),
    ((0.3089 + 0.3514j, 0.7056 + 0.8026j), -0.3684),
    ((0.0466 - 0.0000j, 0.6862 + 0.1708j), -1.2874),
    ((0.8613, 1.1611), -1.0468),
    ((0.6304 + 0.3204j, 11.0615 - 0.0000j), -0.6793),
    ((0.4698 + 0.1718j, 0.9388 + 0.3433j), -0.8067),
]

TABLE4_IV_ENERGIES = [
    -2.9014 + 0.0703j, -2.9014 - 0.0703j, -0.1963, -2.2253, -0.4493, -0.7280,
    -0.8037 + 0.0679j, -0.8037 - 0.0679j, -1.0997 + 0.1109j, -1.0997 - 0.1109j,
    -1.3411, -1.9846, -1.7716, -1.7648,
]
TABLE4_III_ENERGY = -1.1529

TABLE5_IV_ENERGIES = [
    -3.2814 + 0.1934j, -3.2814 - 0.1934j, -0.2400, -2.4314 + 0.0716j, -2.4314 - 0.0716j,
    -0.5524, -0.8034, -0.9090 + 0.1710j, -0.9090 - 0.1710j, -2.0050, -1.9055,
    -1.4569 + 0.2057j, -1.4569 - 0.2057j, -1.5670, -1.4564,
]

CLASS_ENERGIES = {
    1: {"III": [e for _, e in TABLE2_III], "IV": [e for _, e in TABLE2_IV]},
    2: {"III": [e for _, e in TABLE3_III], "IV": [e for _, e in TABLE3_IV]},
    3: {"III": [TABLE4_III_ENERGY], "IV": TABLE4_IV_ENERGIES},
    4: {"III": [], "IV": TABLE5_IV_ENERGIES},
}

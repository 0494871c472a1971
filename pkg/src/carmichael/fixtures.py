"""Published moduli and Carmichael numbers, stored with their factorizations.

Each entry keeps the factorization string exactly as printed together with
an independently stored decimal value; the test suite checks they agree.
"""
from __future__ import annotations

from dataclasses import dataclass

from .arith import FactoredNat, parse_factorization


@dataclass(frozen=True)
class Fixture:
    name: str
    factorization: str
    decimal: str
    note: str = ""

    @property
    def factored(self) -> FactoredNat:
        return parse_factorization(self.factorization)

    @property
    def value(self) -> int:
        return int(self.decimal)


L1 = Fixture("L1", "2^7*3^3*5^2*7*11*13*17*19*29", "810118108800", "modulus with #P(2,L1) = 45")
L2 = Fixture("L2", "2^7*3^3*5^2*7*11*13*17*19*29*31", "25113661372800", "modulus with #P(2,L2) = 58")

PINCH = Fixture(
    "pinch",
    "17*31*41*43*89*97*167*331",
    "443372888629441",
    "rigid order-2 Carmichael number below 10^16",
)

C2_L1_MINIMAL = (
    Fixture(
        "c2-L1-a",
        "31*37*101*103*109*199*419*449*521*571*911*2089*2551*5851*11969",
        "4924827541614265513589667769108860614401",
    ),
    Fixture(
        "c2-L1-b",
        "41*67*79*181*199*233*239*307*449*521*1217*1871*4159*5851*9281",
        "16075771355347638016980686030521098019201",
    ),
)

C2_L2_FOUR = (
    Fixture(
        "c2-L2-2551",
        "23*43*59*61*79*89*113*131*151*191*307*311*373*419*433*463*701*1217*2551",
        "69560845369554955388165088342528866719334401",
    ),
    Fixture(
        "c2-L2-4523",
        "23*53*59*79*89*101*109*113*131*181*199*233*307*349*433*701*911*1217*4523",
        "112788094121852627374401548507449628984140801",
    ),
    Fixture(
        "c2-L2-5279",
        "61*67*71*89*101*103*113*151*181*191*199*233*239*271*307*419*463*521*571*701*911*5279",
        "28428267389677772376959914325492376114874620587020801",
    ),
    Fixture(
        "c2-L2-15313",
        "41*43*53*61*89*103*113*151*191*311*349*373*419*433*463*521*571*701*929*15313",
        "1717985169415387463787686933915303091226840473601",
    ),
)

NONRIGID_P0 = 1153
NONRIGID_SMALLEST = Fixture(
    "nonrigid-min",
    "23*67*71*89*109*113*191*199*233*239*271*307*373*419*521*911*929*1153*1217*1429*2089*2729*23561",
    "392000251605356793349050844538065236557716721692385776886401",
)
NONRIGID_LARGEST = Fixture(
    "nonrigid-max",
    "23*37*43*53*59*61*67*71*89*103*109*113*131*181*191*199*239*271*311*373*379*419*433*463*521*683"
    "*701*911*929*991*1153*1429*2089*2551*3191*4159*5279*11969*15809*23561*23869*244529",
    "2706440581932960270059556320865135299543027488341564061948937275059222956610372230689798686533299112388959963299201",
)

CLASSIC_ORDER1_BELOW_1E5 = (
    561, 1105, 1729, 2465, 2821, 6601, 8911, 10585, 15841, 29341,
    41041, 46657, 52633, 62745, 63973, 75361,
)

MODULI = (L1, L2)
CARMICHAEL = (PINCH, *C2_L1_MINIMAL, *C2_L2_FOUR, NONRIGID_SMALLEST, NONRIGID_LARGEST)
ALL = MODULI + CARMICHAEL


def by_name(name: str) -> Fixture:
    for fx in ALL:
        if fx.name == name:
            return fx
    raise KeyError(name)

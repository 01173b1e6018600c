"""Print fidelity and kappa of the reference codes on their models."""
from aqec.codes import binomial_code, fidelity, kappa, ladder_code, thirteen_code, trivial_code
from aqec.models import photon_loss, power_law, uniform_decay

CASES = [
    ("free qubit, uniform decay", uniform_decay(2), trivial_code(2)),
    ("13 code, uniform_decay(4)", uniform_decay(4), thirteen_code(1e6)),
    ("13 code, photon_loss(4)", photon_loss(4), thirteen_code(1e6)),
    ("binomial, photon_loss(5)", photon_loss(5), binomial_code(1e6)),
    ("binomial, power_law(5, 0.45)", power_law(5, 0.45), binomial_code(1e6)),
    ("binomial, power_law(5, 0.4)", power_law(5, 0.4), binomial_code(1e6)),
    ("ladder, uniform_decay(6)", uniform_decay(6), ladder_code(6, 1e6)),
]


def main():
    print(f"{'case':34s} {'F':>14s} {'1-F':>10s} {'kappa':>10s}")
    for name, model, code in CASES:
        f = fidelity(model, code)
        print(f"{name:34s} {f:14.10f} {1 - f:10.3e} {kappa(model, code):10.3e}")
    print("\n13 code infidelity times rate (expect 1.5):")
    for g in (1e3, 1e4, 1e5, 1e6):
        print(f"  rate {g:8.0e}: {(1 - fidelity(uniform_decay(4), thirteen_code(g))) * g:.4f}")


if __name__ == "__main__":
    main()

"""
Basic usage examples for pyconic.
"""

from pyconic import (
    BlowUpAnalysis,
    ExponentCatalog,
    adm_mass,
    glued_metric,
    schwarzschild_metric,
    sphere_spectrum,
)
from pyconic.solvers import SolverSettings


def catalog_example():
    """
    Critical exponents of the cone over the round 2-sphere.
    """
    catalog = ExponentCatalog.from_spectrum(sphere_spectrum(3, 4))
    print("Critical exponents (n = 3):")
    for row in catalog.rows:
        print(
            f"  j={row.j}: lambda={row.eigenvalue:g} mult={row.multiplicity} "
            f"nu+={row.nu_plus:g} nu-={row.nu_minus:g}"
        )


def mass_example():
    """
    Extrapolated ADM mass of Schwarzschild with A = 1.
    """
    report = adm_mass(schwarzschild_metric(3, 1.0))
    print(f"\nSchwarzschild mass: {report.mass:.10f} +- {report.error_bar:.2e}")
    print(f"  expected 4(n-1)A = {4 * 2 * 1.0:g}")


def blowup_example():
    """
    Blow up the tip of a cone of slope 1/2 glued to Euclidean space.
    """
    print("\nRunning BlowUpAnalysis on glued(a=0.5)...")
    analysis = BlowUpAnalysis(
        deltas=(0.1, 0.2, 0.4),
        settings=SolverSettings(points_per_decade=200),
        verbose=True,
    )
    analysis.fit(glued_metric(3, aperture=0.5))

    summary = analysis.evaluate()
    print(f"  A = {summary['A']:.6f}")
    print(f"  base mass = {summary['base_mass']:.6f}")
    for row in summary["blowups"]:
        print(
            f"  delta={row['delta']:g}: mass={row['mass']:.6f} "
            f"decay={row['decay_exponent']:.3f} s0={row['s0']:.4g} "
            f"H(s0)={row['H_s0']:.4g}"
        )
    print(
        f"  mass shift coefficient {summary['shift_coefficient']:.6f} "
        f"matches {summary['matched_constant']}"
    )
    print(f"  fit time: {analysis.fit_time_:.2f}s")


if __name__ == "__main__":
    catalog_example()
    mass_example()
    blowup_example()

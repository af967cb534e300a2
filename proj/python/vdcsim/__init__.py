"""Serial-chain contact simulation with adaptive impedance allocation.

Thin wrapper over the compiled extension. The extension lives inside this
package when installed, or as a top-level module when running out of the
build tree with PYTHONPATH pointing at the build directory.
"""

try:
    from . import _vdcsim as _impl
except ImportError:  # build-tree layout
    import _vdcsim as _impl

ExperimentConfig = _impl.ExperimentConfig
load_config = _impl.load_config
parse_config = _impl.parse_config
default_contact_experiment = _impl.default_contact_experiment
planar_3r_home = _impl.planar_3r_home
run = _impl.run
derive_gains = _impl.derive_gains
pseudo_inertia = _impl.pseudo_inertia
pseudo_inertia_min_eig = _impl.pseudo_inertia_min_eig
regressor = _impl.regressor
zwidth_sweep = _impl.zwidth_sweep

__all__ = [
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "default_contact_experiment",
    "planar_3r_home",
    "run",
    "derive_gains",
    "pseudo_inertia",
    "pseudo_inertia_min_eig",
    "regressor",
    "zwidth_sweep",
]

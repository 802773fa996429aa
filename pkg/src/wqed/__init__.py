"""Few-photon transport in one-dimensional waveguide QED.

Modules
-------
core          parameter records, grids and units
analytic2le   closed-form one- and two-photon scattering off a two-level emitter
router3le     three-level router and driven-qubit steady state
lattice       tight-binding wavepacket simulations used as a numerical oracle
rydberg       two-photon Rydberg-polariton propagation and bound states
cli           experiment runner (``wqed`` command)
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("wqed")
except PackageNotFoundError:
    __version__ = "0.0.0"

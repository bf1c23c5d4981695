"""condcensus: numerics for spectral counting by analytic conductor.

Submodules
----------
number_field        exact ideal arithmetic, Dirichlet convolutions, Dedekind zeta
arch_spectrum       archimedean parameters, conductors, Plancherel density, majorizer
global_census       leading-term constants and the adelic volume curve
sato_tate           unitary-ensemble sampling and symmetry-type indicators
special_asymptotics complexified sphere transforms and steepest-descent checks
localizers          spectral localizers, region geometry, boundary volumes
cli                 batch front end (`condcensus <subcommand>`)
"""

__version__ = "0.1.0"

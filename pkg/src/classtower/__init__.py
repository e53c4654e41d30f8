"""Two-class tower groups G(m,n) of biquadratic Dirichlet fields.

Builds the parametrized 2-groups from their polycyclic presentation, computes
Artin patterns (transfer targets and kernels) from first principles, derives
the parameters (m, n) from 2-class numbers of imaginary quadratic fields and
surveys the admissible radicands d = p1*p2*q.
"""

__version__ = "0.1.0"

"""
g0dist - Compare samples of speckled intensity data under the G0 model using geodesic distances.
"""

__version__ = "0.1.0"
__author__ = "g0dist contributors"
__description__ = "Geodesic-distance tests between G0 samples"

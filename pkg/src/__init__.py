"""polyimage: images of multilinear polynomials on matrix rings."""

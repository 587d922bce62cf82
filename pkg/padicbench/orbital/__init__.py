# Orbital integrals and Fourier transforms on sl2

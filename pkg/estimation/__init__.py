# Estimation Package

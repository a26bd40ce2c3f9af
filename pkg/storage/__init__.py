# Storage Package

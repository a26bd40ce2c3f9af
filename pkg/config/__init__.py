# Config Package

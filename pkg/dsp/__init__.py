# DSP Package

"""
Finite-field arithmetic and dense matrices over F_q
"""

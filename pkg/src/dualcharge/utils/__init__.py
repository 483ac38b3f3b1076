"""
Custom utilies for the application
"""

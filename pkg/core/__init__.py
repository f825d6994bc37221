"""Core functionality for GeoPursuit"""

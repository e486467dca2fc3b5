"""Точная арифметика и исчисление массовой линейности для гладких многогранников"""

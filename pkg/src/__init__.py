"""
Atenção Axial Canalizada.

Biblioteca numérica e CLI de benchmark: a atenção axial (e a autoatenção) é decomposta em
reponderação e soma, com portões de canal espacialmente variáveis inseridos entre as duas
etapas, e pode ser executada em grupos de linhas para limitar o pico de memória.

Módulos principais:
    - core: Constantes, exceções e configuração de logs.
    - tensor: Tensor imutável, operações, diferenciação reversa, gerador e contêiner binário.
    - kernels: Mapas de atenção, atenção axial e autoatenção, decomposição e modelo de custo.
    - channelize: Portões de canal, atenção canalizada e linhas de base com SE.
    - groupexec: Planejamento, execução e medição em grupos.
    - oracle: Implementações de referência em laços Python.
    - schemas: Definição de tipos e validação (Pydantic).
    - services: Suítes de verificação, benchmark, modelo de custo e fixtures.
    - utils: Inicializadores, comparação numérica e CSV.
"""

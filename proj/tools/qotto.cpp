#include <cstdio>
int main() { std::puts("qotto cli placeholder"); }

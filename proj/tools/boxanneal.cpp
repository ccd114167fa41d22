#include "app/commands.hpp"

int main(int argc, char** argv) { return boxanneal::app::run(argc, argv); }

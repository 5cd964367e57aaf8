int Global;
int Result;

void *Thread1(void *arg) {
  Global = 1;
  return 0;
}

int main() {
  pthread_t t;
  pthread_create(&t, 0, Thread1, 0);
  if (Global == 0) {
    Result = 5;
  }
  pthread_join(t, 0);
  return Result;
}
